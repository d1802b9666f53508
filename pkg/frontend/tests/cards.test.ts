import { describe, expect, it } from "vitest";

import { buildCandidateCards, selectionChoices } from "../src/cards.js";
import { parseWithRaw } from "../src/jsonraw.js";
import { StageRecommendationJson } from "../src/types.js";

// A realistic /pipelines response fragment with awkward number spellings that
// JSON.parse would normally reformat.
const PAYLOAD_TEXT = `{
  "candidates": {
    "model_training": {
      "stage": "model_training",
      "candidates": [
        {
          "id": "svc-a",
          "name": "alpha trainer",
          "breakdown": {"keyword": 0.85, "semantic": 0.9200000000000001,
                        "compatibility": 1.0, "pattern": 0.45,
                        "composite": 0.8210000000000001,
                        "weights": [0.3, 0.3, 0.2, 0.2],
                        "explanation": "keyword match at 0.85"},
          "explanation": "keyword match at 0.85"
        },
        {
          "id": "svc-b",
          "name": "beta trainer",
          "breakdown": {"keyword": 0.0, "semantic": 1e-05,
                        "compatibility": 0.6666666666666666, "pattern": 0.0,
                        "composite": 0.13333633333333334,
                        "weights": [0.3, 0.3, 0.2, 0.2],
                        "explanation": "zero keyword"},
          "explanation": "zero keyword"
        }
      ]
    }
  }
}`;

function cards() {
  const { data, raw } = parseWithRaw<{
    candidates: Record<string, StageRecommendationJson>;
  }>(PAYLOAD_TEXT);
  return buildCandidateCards(
    data.candidates.model_training, raw, "candidates.model_training");
}

describe("buildCandidateCards", () => {
  it("renders numbers byte-equal to the API JSON", () => {
    const [first, second] = cards();
    expect(first.signals.map((s) => s.display)).toEqual([
      "0.85", "0.9200000000000001", "1.0", "0.45",
    ]);
    expect(first.composite).toBe("0.8210000000000001");
    expect(second.signals.map((s) => s.display)).toEqual([
      "0.0", "1e-05", "0.6666666666666666", "0.0",
    ]);
    expect(second.composite).toBe("0.13333633333333334");
  });

  it("preserves the server's ranking order and never reorders", () => {
    const result = cards();
    expect(result.map((c) => c.id)).toEqual(["svc-a", "svc-b"]);
    expect(result.map((c) => c.rank)).toEqual([1, 2]);
  });

  it("carries the explanation text through verbatim", () => {
    const [first] = cards();
    expect(first.explanation).toBe("keyword match at 0.85");
  });

  it("maps signal values to bar percentages without touching displays", () => {
    const [first] = cards();
    expect(first.signals[0].percent).toBeCloseTo(85, 9);
    expect(first.signals[2].percent).toBe(100);
  });
});

describe("selectionChoices", () => {
  it("sends only overrides, stages left at default are omitted", () => {
    const defaults = new Map([["model_training", "svc-a"], ["evaluation", "svc-x"]]);
    const picks = new Map([["model_training", "svc-b"], ["evaluation", "svc-x"]]);
    expect(selectionChoices(picks, defaults)).toEqual({ model_training: "svc-b" });
  });

  it("empty picks means autonomous defaults", () => {
    const defaults = new Map([["model_training", "svc-a"]]);
    expect(selectionChoices(new Map(), defaults)).toEqual({});
  });
});
