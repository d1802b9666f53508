"""Intent parsing: goal text + data profile -> validated task specification.

A provider (rule engine by default, remote model optionally) maps the goal to
one of the supported task types; the target column binds from the profile for
supervised tasks only. Required stages come from a fixed per-task table with
two data-conditional insertions: cleaning when overall quality dips below 0.7
and feature engineering when categorical or text features are present.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import List, Optional

from .errors import IntentError, UnsupportedGoal
from .profiler import DataProfile

TASK_TYPES = ("classification", "regression", "clustering",
              "dimensionality_reduction", "anomaly_detection", "eda")

STAGES = ("data_cleaning", "feature_engineering", "model_training", "evaluation",
          "reporting", "clustering", "dim_reduction", "anomaly_detection", "profiling")

SUPERVISED = ("classification", "regression")

INTENT_SCHEMA_VERSION = "1"

# Goal keywords per task family; supervised disambiguates via target cardinality.
_KEYWORDS = {
    "supervised": ("predict", "forecast", "classify", "estimate"),
    "clustering": ("cluster", "clusters", "segment", "segments", "group"),
    "dimensionality_reduction": ("visualize", "reduce", "projection", "project", "compress"),
    "anomaly_detection": ("anomaly", "anomalies", "outlier", "outliers", "fraud", "unusual"),
    "eda": ("explore", "profile", "analyze", "analyse", "summarize", "describe", "insight"),
}

QUALITY_CLEANING_THRESHOLD = 0.7
MIN_ROWS_ERROR = 10
MIN_ROWS_WARNING = 100
CLASSIFICATION_MAX_CLASSES = 20


@dataclass
class Intent:
    task_type: str
    target: Optional[str]
    required_stages: List[str]
    optional_stages: List[str]
    constraints: dict
    reasoning: dict
    provider_id: str

    def to_dict(self) -> dict:
        return {
            "intent_version": INTENT_SCHEMA_VERSION,
            "task_type": self.task_type,
            "target": self.target,
            "required_stages": list(self.required_stages),
            "optional_stages": list(self.optional_stages),
            "constraints": self.constraints,
            "reasoning": self.reasoning,
            "provider_id": self.provider_id,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Intent":
        return cls(
            task_type=d["task_type"],
            target=d.get("target"),
            required_stages=list(d["required_stages"]),
            optional_stages=list(d.get("optional_stages", [])),
            constraints=dict(d.get("constraints", {})),
            reasoning=dict(d.get("reasoning", {})),
            provider_id=d.get("provider_id", ""),
        )


@dataclass(frozen=True)
class IntentValidation:
    errors: tuple
    warnings: tuple

    @property
    def passed(self) -> bool:
        return not self.errors


def _quality_word(overall: float) -> str:
    if overall >= 0.9:
        return "high"
    if overall >= 0.7:
        return "moderate"
    return "low"


class RuleIntentProvider:
    """Deterministic keyword-scoring provider; no network, no state.

    Scores each task family by goal-keyword hits; supervised wins become
    classification when the best target has at most 20 distinct values,
    regression otherwise.
    """

    provider_id = "rule-intent/1"

    def infer(self, goal: str, profile: DataProfile) -> dict:
        words = re.findall(r"[a-z0-9]+", goal.lower())
        word_set = set(words)
        scores = {family: sum(1 for kw in kws if kw in word_set)
                  for family, kws in _KEYWORDS.items()}
        best_family = max(scores, key=lambda f: (scores[f], -list(_KEYWORDS).index(f)))
        if scores[best_family] == 0:
            raise UnsupportedGoal(f"no supported task type matches goal: {goal!r}")

        target = None
        if best_family == "supervised":
            # A column named in the goal takes precedence; otherwise the
            # profiler's best candidate binds.
            named = [s.name for s in profile.schema if s.name.lower() in word_set]
            target = named[0] if named else profile.best_target
            if target is not None and target in profile.stats \
                    and profile.stats[target].cardinality <= CLASSIFICATION_MAX_CLASSES:
                task_type = "classification"
            else:
                task_type = "regression"
        else:
            task_type = best_family

        quality = _quality_word(profile.quality.overall)
        reasoning = {
            "summary": f"{goal.strip()} with {quality} data quality",
            "task_type": f"goal keywords {sorted(k for k in word_set if any(k in kws for kws in _KEYWORDS.values()))} "
                         f"indicate {task_type}",
        }
        if target:
            reasoning["target"] = f"bound target column {target!r} from the data profile"
        constraints = {
            "time_budget": None,
            "interpretability": any(w in word_set for w in ("interpretable", "explainable", "simple")),
        }
        return {
            "task_type": task_type,
            "target": target,
            "constraints": constraints,
            "reasoning": reasoning,
        }


def derive_stages(task_type: str, profile: DataProfile) -> List[str]:
    """Fixed stage table per task type with data-conditional insertions.

    Cleaning joins when overall quality < 0.7; feature engineering joins for
    supervised and clustering tasks when a categorical or free-text feature
    (other than the target) is present.
    """
    if task_type not in TASK_TYPES:
        raise IntentError(f"unknown task type: {task_type}")
    needs_cleaning = profile.quality.overall < QUALITY_CLEANING_THRESHOLD
    has_cat_or_text = any(
        s.semantic_type in ("categorical", "free_text") for s in profile.schema)

    if task_type in SUPERVISED:
        stages = ["model_training", "evaluation", "reporting"]
        if has_cat_or_text:
            stages.insert(0, "feature_engineering")
        if needs_cleaning:
            stages.insert(0, "data_cleaning")
    elif task_type == "clustering":
        stages = ["clustering", "evaluation", "reporting"]
        if has_cat_or_text:
            stages.insert(0, "feature_engineering")
        if needs_cleaning:
            stages.insert(0, "data_cleaning")
    elif task_type == "dimensionality_reduction":
        stages = ["dim_reduction", "reporting"]
        if needs_cleaning:
            stages.insert(0, "data_cleaning")
    elif task_type == "anomaly_detection":
        stages = ["anomaly_detection", "evaluation", "reporting"]
        if needs_cleaning:
            stages.insert(0, "data_cleaning")
    else:  # eda
        stages = ["profiling", "reporting"]
    return stages


def parse_goal(goal: str, profile: DataProfile, provider=None) -> Intent:
    """Turn (goal, profile) into a structured Intent via the provider."""
    if not goal or not goal.strip():
        raise IntentError("goal text is empty")
    provider = provider or RuleIntentProvider()
    fields = provider.infer(goal, profile)
    task_type = fields["task_type"]
    if task_type not in TASK_TYPES:
        raise IntentError(f"provider returned unknown task type: {task_type}")
    target = fields.get("target") if task_type in SUPERVISED else None
    required = derive_stages(task_type, profile)
    reasoning = dict(fields.get("reasoning", {}))
    reasoning.setdefault("stages", f"stage table for {task_type} produced {required}")
    return Intent(
        task_type=task_type,
        target=target,
        required_stages=required,
        optional_stages=[],
        constraints=dict(fields.get("constraints", {"time_budget": None, "interpretability": False})),
        reasoning=reasoning,
        provider_id=getattr(provider, "provider_id", "unknown"),
    )


def validate_intent(intent: Intent, profile: DataProfile) -> IntentValidation:
    """Blocking errors and non-blocking warnings for a parsed intent."""
    errors = []
    warnings = []
    column_names = {s.name for s in profile.schema}

    if intent.task_type in SUPERVISED:
        if intent.target is None:
            errors.append("supervised task but no target column could be bound")
        elif intent.target not in column_names:
            errors.append(f"target column {intent.target!r} does not exist in the dataset")
        else:
            stats = profile.stats[intent.target]
            schema = next(s for s in profile.schema if s.name == intent.target)
            if (intent.task_type == "classification"
                    and schema.storage_type == "float"
                    and stats.cardinality > CLASSIFICATION_MAX_CLASSES):
                errors.append(
                    f"classification target {intent.target!r} looks continuous "
                    f"({stats.cardinality} distinct values)")
    elif intent.target is not None:
        errors.append(f"{intent.task_type} task must not bind a target column")

    if not intent.required_stages:
        errors.append("required stages list is empty")

    if profile.row_count < MIN_ROWS_ERROR:
        errors.append(f"dataset too small: {profile.row_count} rows (minimum {MIN_ROWS_ERROR})")
    elif profile.row_count < MIN_ROWS_WARNING:
        warnings.append(f"dataset is small: {profile.row_count} rows "
                        f"(below {MIN_ROWS_WARNING}); results may be unstable")

    return IntentValidation(errors=tuple(errors), warnings=tuple(warnings))
