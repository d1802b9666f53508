"""Intent parsing, stage derivation and validation."""

import pytest

from pipeforge.errors import IntentError, UnsupportedGoal
from pipeforge.intent import (
    Intent,
    RuleIntentProvider,
    derive_stages,
    parse_goal,
    validate_intent,
)
from pipeforge.profiler import profile


def churn_profile(rows=120):
    body = "\n".join(
        f"{30 + i % 40},{50000 + 173 * (i % 37)},{'basic' if i % 3 else 'plus'},{i % 2}"
        for i in range(rows))
    return profile(f"age,income,plan,churn\n{body}\n".encode(), "churn.csv")


def numeric_profile(rows=150):
    body = "\n".join(f"{i % 17},{(i * 31) % 113},{(i * 7 + 3) % 219}.5" for i in range(rows))
    return profile(f"a,b,price\n{body}\n".encode(), "sales.csv")


def test_predict_churn_is_classification_with_target():
    p = churn_profile()
    assert p.best_target == "churn"
    intent = parse_goal("predict customer churn", p)
    assert intent.task_type == "classification"
    assert intent.target == "churn"
    assert intent.reasoning


def test_identify_clusters_is_clustering_without_target():
    intent = parse_goal("identify transaction clusters", numeric_profile())
    assert intent.task_type == "clustering"
    assert intent.target is None


def test_empty_goal():
    with pytest.raises(IntentError):
        parse_goal("  ", churn_profile())


def test_unsupported_goal_surfaces():
    with pytest.raises(UnsupportedGoal):
        parse_goal("make me a sandwich", churn_profile())


def test_regression_when_target_continuous():
    p = numeric_profile()
    intent = parse_goal("forecast the price column", p)
    assert intent.task_type == "regression"
    assert intent.target == "price"


def test_goal_named_column_takes_precedence():
    p = churn_profile()
    intent = parse_goal("predict income for new customers", p)
    assert intent.target == "income"


def test_anomaly_and_eda_and_dimred_keywords():
    p = numeric_profile()
    assert parse_goal("find anomalies in the data", p).task_type == "anomaly_detection"
    assert parse_goal("explore the dataset", p).task_type == "eda"
    assert parse_goal("visualize the main dimensions", p).task_type == "dimensionality_reduction"


# --- derive_stages -----------------------------------------------------------

def low_quality_profile():
    # Mostly-missing plan column plus heavy row duplication drag the harmonic
    # mean well below the 0.7 cleaning threshold.
    body = "\n".join(
        f"{30 + i % 10},{'basic' if i % 10 == 0 else ''},{i % 2}" for i in range(80))
    p = profile(f"age,plan,churn\n{body}\n".encode(), "lowq.csv")
    assert p.quality.overall < 0.7
    return p


def test_stage_table_classification_low_quality_categorical():
    stages = derive_stages("classification", low_quality_profile())
    assert stages == ["data_cleaning", "feature_engineering", "model_training",
                      "evaluation", "reporting"]


def test_stage_table_eda_perfect_quality():
    stages = derive_stages("eda", numeric_profile())
    assert stages == ["profiling", "reporting"]


def test_stage_table_clustering_has_no_model_training():
    stages = derive_stages("clustering", numeric_profile())
    assert "clustering" in stages
    assert "model_training" not in stages


def test_stage_table_supervised_clean_data_no_categfor():
    stages = derive_stages("regression", numeric_profile())
    assert stages == ["model_training", "evaluation", "reporting"]


def test_stage_table_is_pure():
    p = churn_profile()
    assert derive_stages("classification", p) == derive_stages("classification", p)


def test_stage_table_unknown_task():
    with pytest.raises(IntentError):
        derive_stages("time_travel", numeric_profile())


# --- validate_intent ---------------------------------------------------------

def make_intent(**overrides) -> Intent:
    base = dict(
        task_type="classification",
        target="churn",
        required_stages=["model_training", "evaluation", "reporting"],
        optional_stages=[],
        constraints={"time_budget": None, "interpretability": False},
        reasoning={},
        provider_id="rule-intent/1",
    )
    base.update(overrides)
    return Intent(**base)


def test_validate_clean_intent():
    v = validate_intent(make_intent(), churn_profile())
    assert v.errors == () and v.warnings == ()


def test_validate_missing_target_column():
    v = validate_intent(make_intent(target="nonexistent"), churn_profile())
    assert any("does not exist" in e for e in v.errors)


def test_validate_small_dataset_warning():
    v = validate_intent(make_intent(), churn_profile(rows=50))
    assert v.errors == ()
    assert any("small" in w for w in v.warnings)


def test_validate_tiny_dataset_error():
    v = validate_intent(make_intent(), churn_profile(rows=8))
    assert any("too small" in e for e in v.errors)


def test_validate_supervised_without_target():
    v = validate_intent(make_intent(target=None), churn_profile())
    assert any("no target" in e for e in v.errors)


def test_validate_continuous_classification_target():
    p = numeric_profile()
    v = validate_intent(make_intent(target="price"), p)
    assert any("continuous" in e for e in v.errors)


def test_target_presence_iff_supervised():
    p = churn_profile()
    for goal, supervised in [("predict churn", True), ("cluster customers", False),
                             ("explore data", False), ("find outliers", False)]:
        intent = parse_goal(goal, p)
        assert (intent.target is not None) == supervised


def test_intent_json_roundtrip():
    intent = parse_goal("predict customer churn", churn_profile())
    back = Intent.from_dict(intent.to_dict())
    assert back.to_json() == intent.to_json()
