"""Pipeline builder: selection, parameter inference, DAG assembly, validation.

Selection is either autonomous (top-ranked candidate per stage) or interactive
(caller-supplied choices validated against the candidate lists). Steps form a
strictly linear chain — each stage's output feeds the next stage's input — and
the assembled pipeline passes a four-part validation (stage completeness, data
flow compatibility, column references, dataset size) before it may be marked
ready for execution.
"""

from __future__ import annotations

import json
import re
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .catalog import CatalogStore, Microservice
from .errors import IncompleteSelection, InvalidChoice, MissingCandidates, ProviderMalformedOutput
from .intent import MIN_ROWS_ERROR, MIN_ROWS_WARNING, Intent
from .profiler import DataProfile
from .recommender import Recommendation

PIPELINE_SCHEMA_VERSION = "1"

STEP_STATUSES = ("pending", "running", "succeeded", "failed", "substituted")
PIPELINE_STATUSES = ("draft", "ready", "running", "completed", "failed")

_PARAM_TABLES_PATH = Path(__file__).parent / "data" / "param_tables.json"
_NAME_SANITIZE_RE = re.compile(r"[^A-Za-z0-9 _-]+")
MAX_NAME_LENGTH = 60


def _load_param_tables() -> dict:
    return json.loads(_PARAM_TABLES_PATH.read_text(encoding="utf-8"))


_param_tables = None


def param_tables() -> dict:
    global _param_tables
    if _param_tables is None:
        _param_tables = _load_param_tables()
    return _param_tables


@dataclass
class PipelineStep:
    order: int  # 1-based, contiguous
    stage: str
    microservice_id: str
    params: dict
    depends_on: Optional[int]  # previous step order, None for the first step
    expected_input_format: str
    expected_output_format: str
    status: str = "pending"

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "stage": self.stage,
            "microservice_id": self.microservice_id,
            "params": self.params,
            "depends_on": self.depends_on,
            "expected_input_format": self.expected_input_format,
            "expected_output_format": self.expected_output_format,
            "status": self.status,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineStep":
        return cls(**d)


@dataclass
class Pipeline:
    id: str
    name: str
    owner: str
    steps: List[PipelineStep]
    status: str
    intent: Intent
    profile_ref: str

    @property
    def edges(self) -> List[tuple]:
        return [(s.depends_on, s.order) for s in self.steps if s.depends_on is not None]

    def step_by_order(self, order: int) -> PipelineStep:
        return self.steps[order - 1]

    def to_dict(self) -> dict:
        return {
            "pipeline_version": PIPELINE_SCHEMA_VERSION,
            "id": self.id,
            "name": self.name,
            "owner": self.owner,
            "status": self.status,
            "intent": self.intent.to_dict(),
            "profile_ref": self.profile_ref,
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Pipeline":
        return cls(
            id=d["id"],
            name=d["name"],
            owner=d["owner"],
            steps=[PipelineStep.from_dict(s) for s in d["steps"]],
            status=d["status"],
            intent=Intent.from_dict(d["intent"]),
            profile_ref=d["profile_ref"],
        )

    @classmethod
    def from_json(cls, text: str) -> "Pipeline":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PipelineValidation:
    checks: dict  # check name -> ("pass" | "error" | "warning", message)

    @property
    def errors(self) -> List[str]:
        return [f"{name}: {msg}" for name, (level, msg) in self.checks.items()
                if level == "error"]

    @property
    def warnings(self) -> List[str]:
        return [f"{name}: {msg}" for name, (level, msg) in self.checks.items()
                if level == "warning"]

    @property
    def passed(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {name: {"level": level, "message": msg}
                for name, (level, msg) in self.checks.items()}


# ---------------------------------------------------------------------------
# Selection
# ---------------------------------------------------------------------------

def select(recommendations: Dict[str, Recommendation], mode: str = "autonomous",
           choices: Optional[Dict[str, str]] = None) -> Dict[str, str]:
    """Resolve one microservice id per stage.

    Autonomous takes the top-ranked candidate. Interactive honors the caller's
    per-stage choices (validated against that stage's candidates) and falls
    back to top-ranked for unchosen stages.
    """
    if mode not in ("autonomous", "interactive"):
        raise ValueError(f"unknown selection mode: {mode}")
    choices = choices or {}
    selection: Dict[str, str] = {}
    for stage, rec in recommendations.items():
        if not rec.candidates:
            raise MissingCandidates(f"stage {stage} has no candidates")
        if mode == "interactive" and stage in choices:
            chosen = choices[stage]
            if chosen not in rec.ids():
                raise InvalidChoice(
                    f"{chosen!r} is not a candidate for stage {stage}")
            selection[stage] = chosen
        else:
            selection[stage] = rec.candidates[0][0]
    return selection


# ---------------------------------------------------------------------------
# Parameter inference
# ---------------------------------------------------------------------------

def _lookup_tiered(rows: list, key: str, value: float) -> dict:
    for row in rows:
        if value >= row[key]:
            return {k: v for k, v in row.items() if k != key}
    return {}


class FallbackParamProvider:
    """Deterministic parameter tables driven by quality, task type and size."""

    provider_id = "param-tables/1"

    def infer(self, ms: Microservice, stage: str, intent: Intent,
              profile: DataProfile, context: Optional[dict]) -> dict:
        tables = param_tables()
        params: dict = {}
        if stage == "data_cleaning":
            imp = _lookup_tiered(tables["cleaning"]["imputation_by_completeness"],
                                 "min_completeness", profile.quality.completeness)
            out = _lookup_tiered(tables["cleaning"]["outlier_by_consistency"],
                                 "min_consistency", profile.quality.consistency)
            params["imputation_strategy"] = imp["strategy"]
            params["outlier_method"] = out["method"]
            params["outlier_iqr_multiplier"] = out["iqr_multiplier"]
        elif stage == "feature_engineering":
            params.update(tables["feature_engineering"]["by_task"][intent.task_type])
        elif stage in ("model_training", "clustering", "dim_reduction", "anomaly_detection"):
            tier = _lookup_tiered(tables["training"]["complexity_by_rows"],
                                  "min_rows", profile.row_count)
            params["model_complexity"] = tier["complexity"]
            params["algorithm_family"] = tier["family"]
        elif stage == "evaluation":
            params["task_type"] = intent.task_type
        elif stage == "profiling":
            params["include_correlations"] = True
        return params


def infer_params(ms: Microservice, stage: str, intent: Intent, profile: DataProfile,
                 context: Optional[dict] = None, provider=None) -> dict:
    """Provider-inferred step parameters, with reserved keys always injected.

    target_column and input_format come from the intent and profile and cannot
    be overridden by the provider; a malformed provider response falls back to
    the deterministic tables.
    """
    fallback = FallbackParamProvider()
    provider = provider or fallback
    try:
        params = provider.infer(ms, stage, intent, profile, context)
        if not isinstance(params, dict):
            raise ProviderMalformedOutput("params must be a flat JSON object")
    except ProviderMalformedOutput:
        params = fallback.infer(ms, stage, intent, profile, context)
    params = dict(params)
    params["target_column"] = intent.target
    params["input_format"] = profile.format
    return params


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

def pipeline_name(goal: str) -> str:
    """Human-readable name: first 60 chars of the goal, sanitized."""
    cleaned = _NAME_SANITIZE_RE.sub("", goal).strip()
    return cleaned[:MAX_NAME_LENGTH] or "pipeline"


def build(selection: Dict[str, str], intent: Intent, profile: DataProfile,
          catalog: CatalogStore, goal: str = "", owner: str = "default",
          param_provider=None, pipeline_id: Optional[str] = None) -> Pipeline:
    """Assemble a draft pipeline: ordered steps, linear edges, chained formats."""
    missing = [s for s in intent.required_stages if s not in selection]
    if missing:
        raise IncompleteSelection(f"selection missing stages: {missing}")

    steps: List[PipelineStep] = []
    context: Optional[dict] = None
    prev_output = {"csv": "csv", "tsv": "tsv", "json_records": "json"}.get(
        profile.format, profile.format)
    for order, stage in enumerate(intent.required_stages, start=1):
        ms = catalog.get(selection[stage])
        params = infer_params(ms, stage, intent, profile, context, provider=param_provider)
        analysis = ms.analysis
        input_fmt = analysis.input_formats[0] if analysis and analysis.input_formats else prev_output
        output_fmt = analysis.output_formats[0] if analysis and analysis.output_formats else input_fmt
        steps.append(PipelineStep(
            order=order,
            stage=stage,
            microservice_id=ms.id,
            params=params,
            depends_on=order - 1 if order > 1 else None,
            expected_input_format=input_fmt,
            expected_output_format=output_fmt,
        ))
        context = {"stage": stage, "microservice": ms.submission.name,
                   "output_format": output_fmt}
        prev_output = output_fmt

    return Pipeline(
        id=pipeline_id or uuid.uuid4().hex[:12],
        name=pipeline_name(goal or intent.reasoning.get("summary", "")),
        owner=owner,
        steps=steps,
        status="draft",
        intent=intent,
        profile_ref=profile.source_name,
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_pipeline(pipeline: Pipeline, profile: DataProfile,
                      catalog: Optional[CatalogStore] = None) -> PipelineValidation:
    """Four checks, all always evaluated; zero errors moves draft -> ready."""
    checks: dict = {}

    built_stages = [s.stage for s in pipeline.steps]
    missing = [s for s in pipeline.intent.required_stages if s not in built_stages]
    if missing:
        checks["stage_completeness"] = ("error", f"missing stages: {missing}")
    else:
        checks["stage_completeness"] = ("pass", "all required stages present")

    mismatches = []
    for prev, nxt in zip(pipeline.steps, pipeline.steps[1:]):
        declared_inputs = None
        if catalog is not None:
            analysis = catalog.get(nxt.microservice_id).analysis
            declared_inputs = analysis.input_formats if analysis else None
        if declared_inputs:
            if prev.expected_output_format not in declared_inputs:
                mismatches.append(
                    f"step {prev.order} outputs {prev.expected_output_format}, "
                    f"step {nxt.order} accepts {list(declared_inputs)}")
        elif prev.expected_output_format != nxt.expected_input_format:
            mismatches.append(
                f"step {prev.order} outputs {prev.expected_output_format}, "
                f"step {nxt.order} expects {nxt.expected_input_format}")
    checks["dataflow_compat"] = ("error", "; ".join(mismatches)) if mismatches \
        else ("pass", "adjacent step formats line up")

    target = pipeline.intent.target
    if target is not None and target not in {s.name for s in profile.schema}:
        checks["column_refs"] = ("error", f"target column {target!r} not in dataset")
    else:
        checks["column_refs"] = ("pass", "referenced columns exist")

    if profile.row_count < MIN_ROWS_ERROR:
        checks["dataset_size"] = ("error",
                                  f"{profile.row_count} rows < minimum {MIN_ROWS_ERROR}")
    elif profile.row_count < MIN_ROWS_WARNING:
        checks["dataset_size"] = ("warning",
                                  f"{profile.row_count} rows below {MIN_ROWS_WARNING}")
    else:
        checks["dataset_size"] = ("pass", f"{profile.row_count} rows")

    validation = PipelineValidation(checks=checks)
    if pipeline.status == "draft" and validation.passed:
        pipeline.status = "ready"
    return validation
