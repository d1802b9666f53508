/**
 * Candidate card view models for the interactive selection flow.
 *
 * Signal values come verbatim from the API response text (raw number
 * literals), candidate order is the server's ranking order, and nothing is
 * recomputed here — the bar widths reuse the same parsed numbers purely for
 * presentation.
 */

import { RawIndex, rawAt } from "./jsonraw.js";
import { CandidateJson, StageRecommendationJson } from "./types.js";

export interface SignalBar {
  label: string;
  /** Exact literal from the API JSON body. */
  display: string;
  /** Parsed value, used only for the bar width (0..100). */
  percent: number;
}

export interface CandidateCard {
  stage: string;
  rank: number;
  id: string;
  name: string;
  signals: SignalBar[];
  composite: string;
  explanation: string;
}

const SIGNAL_FIELDS: [string, "keyword" | "semantic" | "compatibility" | "pattern"][] = [
  ["keyword", "keyword"],
  ["semantic", "semantic"],
  ["compatibility", "compatibility"],
  ["pattern", "pattern"],
];

function card(
  stage: string,
  rank: number,
  candidate: CandidateJson,
  raw: RawIndex,
  basePath: string,
): CandidateCard {
  const signals = SIGNAL_FIELDS.map(([label, field]) => ({
    label,
    display: rawAt(raw, `${basePath}.breakdown.${field}`, candidate.breakdown[field]),
    percent: Math.max(0, Math.min(100, candidate.breakdown[field] * 100)),
  }));
  return {
    stage,
    rank,
    id: candidate.id,
    name: candidate.name ?? candidate.id,
    signals,
    composite: rawAt(raw, `${basePath}.breakdown.composite`, candidate.breakdown.composite),
    explanation: candidate.explanation,
  };
}

/**
 * Build cards for one stage. `basePath` is the JSON path of the stage object
 * inside the response body (e.g. "candidates.model_training").
 */
export function buildCandidateCards(
  rec: StageRecommendationJson,
  raw: RawIndex,
  basePath: string,
): CandidateCard[] {
  return rec.candidates.map((candidate, i) =>
    card(rec.stage, i + 1, candidate, raw, `${basePath}.candidates.${i}`),
  );
}

/** Stage -> chosen id map for the selections endpoint; omits defaults. */
export function selectionChoices(
  picks: Map<string, string>,
  defaults: Map<string, string>,
): Record<string, string> {
  const choices: Record<string, string> = {};
  for (const [stage, id] of picks) {
    if (defaults.get(stage) !== id) {
      choices[stage] = id;
    }
  }
  return choices;
}
