import { describe, expect, it } from "vitest";

import { buildCatalogRows, buildDualDocs, buildFindingRows } from "../src/catalog.js";
import { MicroserviceJson } from "../src/types.js";

const SERVICE: MicroserviceJson = {
  id: "svc-1",
  state: "indexed",
  created_at: "2024-01-01T00:00:00Z",
  composite_text: "…",
  submission: {
    name: "medianfill",
    user_description: "Fills missing values. Totally also does clustering.",
    python_version: "3.10",
    category: "preprocessing",
    keywords: ["tables"],
  },
  analysis: {
    semantic_description: "Fill missing numeric cells with the column median.",
    capabilities: ["missing-value imputation", "data cleaning"],
    input_formats: ["csv"],
    output_formats: ["csv"],
    security_flags: [{ pattern: "unsafe-eval", location: "line 3", severity: "high" }],
    analyzer_id: "static-analyzer/1",
    analyzed_at: "2024-01-01T00:00:00Z",
  },
  validation: [
    { check: "pinning", level: "error", message: "requirements line 1 is not an exact pin" },
    { check: "size", level: "warning", message: "code is large" },
  ],
};

describe("catalog view models", () => {
  it("lists rows with capabilities and optional match score", () => {
    const rows = buildCatalogRows([SERVICE, { ...SERVICE, id: "svc-2", match_score: 0.9 }]);
    expect(rows[0]).toMatchObject({ id: "svc-1", name: "medianfill", matchScore: null });
    expect(rows[1].matchScore).toBe(0.9);
    expect(rows[0].capabilities).toContain("data cleaning");
  });

  it("shows author docs and code-derived analysis side by side", () => {
    const docs = buildDualDocs(SERVICE);
    expect(docs.authorDescription).toContain("Totally also does clustering");
    expect(docs.derivedDescription).toContain("column median");
    expect(docs.securityFlags).toEqual(["high: unsafe-eval at line 3"]);
    expect(docs.analyzerId).toBe("static-analyzer/1");
  });

  it("handles unanalyzed services", () => {
    const docs = buildDualDocs({ ...SERVICE, analysis: null });
    expect(docs.derivedDescription).toBe("(not analyzed)");
    expect(docs.capabilities).toEqual([]);
  });

  it("renders validation findings with blocking levels", () => {
    const rows = buildFindingRows(SERVICE.validation);
    expect(rows).toHaveLength(2);
    expect(rows[0]).toMatchObject({ check: "pinning", blocking: true });
    expect(rows[1]).toMatchObject({ check: "size", blocking: false });
    expect(buildFindingRows(null)).toEqual([]);
  });
});
