/**
 * Catalog browsing and upload view models: dual-layer documentation (author
 * docs next to the code-derived analysis) and validation findings rendered
 * exactly as the gateway reported them.
 */

import { MicroserviceJson, ValidationFindingJson } from "./types.js";

export interface CatalogRow {
  id: string;
  name: string;
  category: string;
  state: string;
  capabilities: string[];
  matchScore: number | null;
}

export interface DualDocs {
  name: string;
  authorDescription: string;
  derivedDescription: string;
  capabilities: string[];
  inputFormats: string[];
  outputFormats: string[];
  securityFlags: string[];
  analyzerId: string;
  analyzedAt: string;
}

export interface FindingRow {
  check: string;
  level: string;
  message: string;
  blocking: boolean;
}

export function buildCatalogRows(items: MicroserviceJson[]): CatalogRow[] {
  return items.map((ms) => ({
    id: ms.id,
    name: ms.submission.name,
    category: ms.submission.category,
    state: ms.state,
    capabilities: ms.analysis?.capabilities ?? [],
    matchScore: ms.match_score ?? null,
  }));
}

export function buildDualDocs(ms: MicroserviceJson): DualDocs {
  return {
    name: ms.submission.name,
    authorDescription: ms.submission.user_description,
    derivedDescription: ms.analysis?.semantic_description ?? "(not analyzed)",
    capabilities: ms.analysis?.capabilities ?? [],
    inputFormats: ms.analysis?.input_formats ?? [],
    outputFormats: ms.analysis?.output_formats ?? [],
    securityFlags: (ms.analysis?.security_flags ?? []).map(
      (f) => `${f.severity}: ${f.pattern} at ${f.location}`,
    ),
    analyzerId: ms.analysis?.analyzer_id ?? "",
    analyzedAt: ms.analysis?.analyzed_at ?? "",
  };
}

export function buildFindingRows(findings: ValidationFindingJson[] | null): FindingRow[] {
  return (findings ?? []).map((f) => ({
    check: f.check,
    level: f.level,
    message: f.message,
    blocking: f.level === "error",
  }));
}
