"""Hybrid four-signal recommendation of microservices per pipeline stage.

Each indexed microservice is scored for each required stage as a weighted sum
of four signals, every one in [0, 1]:

  keyword       hierarchical token overlap (name hits count double)
  semantic      cosine similarity between stage query and composite text
  compatibility mean of three binary checks (format, quality-fit, parameters)
  pattern       execution-history reinforcement, 100 successes saturating at 1

Default weights are 0.3 / 0.3 / 0.2 / 0.2. Rankings come with the full
breakdown and a human-readable explanation whose numbers are rendered at full
precision so they are byte-faithful to the breakdown fields.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .catalog import CatalogStore, Microservice
from .errors import EmptyCatalog, RecommenderError
from .intent import Intent
from .patterns import PatternStore
from .profiler import DataProfile
from .semindex import Embedding, VectorIndex, similarity

DEFAULT_WEIGHTS = (0.3, 0.3, 0.2, 0.2)
SEMANTIC_ONLY_WEIGHTS = (0.0, 1.0, 0.0, 0.0)
PATTERN_SATURATION = 100.0
QUALITY_FIT_THRESHOLD = 0.7
DEFAULT_TOP_K = 3

_WORD_RE = re.compile(r"[a-z0-9]+")

REPAIR_MARKERS = ("imputation", "outlier", "cleaning")

_PROFILE_FORMAT_TAGS = {"csv": "csv", "tsv": "tsv", "json_records": "json"}


def validate_weights(weights) -> Tuple[float, float, float, float]:
    weights = tuple(float(w) for w in weights)
    if len(weights) != 4:
        raise RecommenderError("exactly four scoring weights are required")
    if any(w < 0 or w > 1 for w in weights):
        raise RecommenderError(f"weights must lie in [0, 1]: {weights}")
    if abs(sum(weights) - 1.0) > 1e-9:
        raise RecommenderError(f"weights must sum to 1: {weights}")
    return weights


def _words(text: str) -> List[str]:
    return _WORD_RE.findall(text.lower())


def weighted_composite(signals, weights) -> float:
    """The hybrid score: sum(w_i * signal_i). Exact weighted-sum identity."""
    if len(signals) != len(weights):
        raise RecommenderError("signals and weights must align")
    return sum(w * s for w, s in zip(weights, signals))


@dataclass(frozen=True)
class StageQuery:
    stage: str
    task_type: str
    reasoning_snippet: str
    query_text: str
    query_embedding: Embedding

    @classmethod
    def build(cls, stage: str, intent: Intent, index: VectorIndex) -> "StageQuery":
        snippet = intent.reasoning.get("summary", "")
        text = " ".join(part for part in (stage, intent.task_type, snippet) if part)
        return cls(stage=stage, task_type=intent.task_type, reasoning_snippet=snippet,
                   query_text=text, query_embedding=index.embedder.embed(text))


@dataclass(frozen=True)
class ScoreBreakdown:
    keyword: float
    semantic: float
    compatibility: float
    pattern: float
    composite: float
    weights: tuple
    explanation: str

    def to_dict(self) -> dict:
        return {
            "keyword": self.keyword,
            "semantic": self.semantic,
            "compatibility": self.compatibility,
            "pattern": self.pattern,
            "composite": self.composite,
            "weights": list(self.weights),
            "explanation": self.explanation,
        }


@dataclass(frozen=True)
class Recommendation:
    stage: str
    candidates: tuple  # of (microservice id, ScoreBreakdown), descending composite

    def ids(self) -> List[str]:
        return [c[0] for c in self.candidates]

    def to_dict(self, catalog: Optional[CatalogStore] = None) -> dict:
        out = []
        for ms_id, breakdown in self.candidates:
            entry = {"id": ms_id, "breakdown": breakdown.to_dict(),
                     "explanation": breakdown.explanation}
            if catalog is not None:
                entry["name"] = catalog.get(ms_id).submission.name
            out.append(entry)
        return {"stage": self.stage, "candidates": out}


def render_explanation(keyword: float, semantic: float, compatibility: float,
                       pattern: float, composite: float) -> str:
    """Numbers are str(float) — shortest round-trip — so the text is exactly
    faithful to the breakdown fields."""
    return (f"keyword match at {keyword}, semantic similarity at {semantic}, "
            f"data compatibility at {compatibility}, execution pattern at {pattern}; "
            f"composite score {composite}")


class Recommender:
    """Scores indexed microservices against stage queries."""

    def __init__(self, catalog: CatalogStore, index: VectorIndex,
                 patterns: PatternStore, weights=DEFAULT_WEIGHTS,
                 pattern_saturation: float = PATTERN_SATURATION):
        self.catalog = catalog
        self.index = index
        self.patterns = patterns
        self.weights = validate_weights(weights)
        self.pattern_saturation = pattern_saturation

    # -- individual signals ---------------------------------------------------

    def score_keyword(self, ms: Microservice, query: StageQuery) -> float:
        """Name hits weigh 2, description/capability hits weigh 1, normalized
        by 2 * |query tokens| and clamped to 1."""
        query_tokens = list(dict.fromkeys(_words(query.query_text)))
        if not query_tokens:
            return 0.0
        name_tokens = set(_words(ms.submission.name))
        body_tokens = set(_words(ms.analysis.semantic_description)) if ms.analysis else set()
        if ms.analysis:
            for cap in ms.analysis.capabilities:
                body_tokens.update(_words(cap))
        raw = 0.0
        for tok in query_tokens:
            if tok in name_tokens:
                raw += 2.0
            if tok in body_tokens:
                raw += 1.0
        return min(raw / (2.0 * len(query_tokens)), 1.0)

    def score_semantic(self, ms: Microservice, query: StageQuery) -> float:
        """Cosine against the indexed composite embedding, clamped at 0."""
        emb = self.index.embedding(ms.id)
        if emb is None:
            return 0.0
        return max(0.0, similarity(emb, query.query_embedding))

    def score_compat(self, ms: Microservice, stage: str, profile: DataProfile) -> float:
        """Mean of three binary sub-checks: format, quality-fit, parameter-fit."""
        analysis = ms.analysis
        fmt_tag = _PROFILE_FORMAT_TAGS.get(profile.format, profile.format)
        format_ok = 1.0 if analysis and fmt_tag in analysis.input_formats else 0.0

        if profile.quality.overall >= QUALITY_FIT_THRESHOLD:
            quality_ok = 1.0
        else:
            repair = analysis and any(
                marker in cap for cap in analysis.capabilities for marker in REPAIR_MARKERS)
            quality_ok = 1.0 if repair else 0.0

        requires_target = analysis and "requires-target" in analysis.capabilities
        param_ok = 0.0 if (requires_target and profile.best_target is None) else 1.0

        return (format_ok + quality_ok + param_ok) / 3.0

    def score_pattern(self, ms: Microservice, stage: str,
                      user_id: Optional[str] = None) -> float:
        """min(effective successes / 100, 1)."""
        eff = self.patterns.effective(ms.id, stage, user_id=user_id)
        return min(eff / self.pattern_saturation, 1.0)

    # -- composite --------------------------------------------------------------

    def score(self, ms: Microservice, query: StageQuery, profile: DataProfile,
              user_id: Optional[str] = None) -> ScoreBreakdown:
        s1 = self.score_keyword(ms, query)
        s2 = self.score_semantic(ms, query)
        s3 = self.score_compat(ms, query.stage, profile)
        s4 = self.score_pattern(ms, query.stage, user_id=user_id)
        composite = weighted_composite((s1, s2, s3, s4), self.weights)
        return ScoreBreakdown(
            keyword=s1, semantic=s2, compatibility=s3, pattern=s4,
            composite=composite, weights=self.weights,
            explanation=render_explanation(s1, s2, s3, s4, composite))

    def rank_stage(self, stage: str, intent: Intent, profile: DataProfile,
                   k: Optional[int] = None,
                   user_id: Optional[str] = None) -> Recommendation:
        """Score every indexed microservice for one stage; full scan, exact."""
        services = self.catalog.indexed()
        if not services:
            raise EmptyCatalog("no indexed microservices to recommend")
        query = StageQuery.build(stage, intent, self.index)
        scored = [(ms.id, self.score(ms, query, profile, user_id=user_id))
                  for ms in services]
        scored.sort(key=lambda pair: (-pair[1].composite, pair[0]))
        if k is not None:
            scored = scored[:k]
        return Recommendation(stage=stage, candidates=tuple(scored))

    def recommend(self, intent: Intent, profile: DataProfile, k: int = DEFAULT_TOP_K,
                  user_id: Optional[str] = None) -> Dict[str, Recommendation]:
        """Top-k candidates with breakdowns for every required stage."""
        return {
            stage: self.rank_stage(stage, intent, profile, k=k, user_id=user_id)
            for stage in intent.required_stages
        }


def recommendations_to_json(recs: Dict[str, Recommendation],
                            catalog: Optional[CatalogStore] = None) -> str:
    return json.dumps(
        {stage: rec.to_dict(catalog) for stage, rec in recs.items()},
        sort_keys=True, ensure_ascii=False)
