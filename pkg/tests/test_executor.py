"""Executor: sandboxed steps, retry policy, self-healing, confinement."""

import time
from pathlib import Path

import pytest

import service_fixtures as fx
from conftest import make_recommender, make_service
from pipeforge.builder import build, select, validate_pipeline
from pipeforge.errors import ExecutorError
from pipeforge.executor import (
    ExecutorConfig,
    RegexFaultClassifier,
    StepResult,
    SubprocessSandbox,
    execute,
    retry_policy,
    run_step,
    self_heal,
)
from pipeforge.intent import parse_goal
from pipeforge.patterns import PatternStore
from pipeforge.profiler import profile

CSV_DATA = b"f1,f2,churn\n" + b"\n".join(
    f"{i % 13},{(i * 7) % 31},{i % 2}".encode() for i in range(120)) + b"\n"


def fast_config(tmp_path, **overrides) -> ExecutorConfig:
    base = dict(step_timeout=20.0, timeout_grace=1.0, max_retries=3,
                retry_base_delay=0.0, workspace_base=tmp_path / "ws")
    base.update(overrides)
    return ExecutorConfig(**base)


def build_ready_pipeline(services, goal="predict churn", data=CSV_DATA, k=3):
    rec, store, index, patterns = make_recommender(services)
    prof = profile(data, "data.csv")
    intent = parse_goal(goal, prof)
    recs = rec.recommend(intent, prof, k=k)
    pipeline = build(select(recs), intent, prof, store, goal=goal)
    validation = validate_pipeline(pipeline, prof, catalog=store)
    assert validation.passed, validation.errors
    return pipeline, rec, patterns, prof


def three_stage_services(train_code=fx.PASSTHROUGH):
    return [
        make_service("train-1", "churn model trainer", "trains churn models",
                     capabilities=("model training",), code=train_code),
        make_service("eval-1", "model evaluator", "computes accuracy metrics",
                     capabilities=("model evaluation",), code=fx.PASSTHROUGH),
        make_service("report-1", "report writer", "writes summary reports",
                     capabilities=("reporting",), code=fx.PASSTHROUGH),
    ]


# --- retry policy ---------------------------------------------------------------

def test_retry_policy_delays():
    assert retry_policy("nonzero_exit", 1) == ("retry", 1.0)
    assert retry_policy("nonzero_exit", 2) == ("retry", 2.0)
    assert retry_policy("nonzero_exit", 3) == ("retry", 4.0)
    assert retry_policy("nonzero_exit", 4) == ("escalate", None)


def test_retry_policy_custom_base():
    assert retry_policy("timeout", 2, base_delay=0.5) == ("retry", 1.0)


def test_retry_policy_rejects_zero_attempt():
    with pytest.raises(ValueError):
        retry_policy("timeout", 0)


# --- run_step --------------------------------------------------------------------

def make_step(order=1, stage="model_training", ms_id="svc", params=None):
    from pipeforge.builder import PipelineStep
    return PipelineStep(order=order, stage=stage, microservice_id=ms_id,
                        params=params or {"target_column": "churn"},
                        depends_on=None if order == 1 else order - 1,
                        expected_input_format="csv", expected_output_format="csv")


def run_one(tmp_path, code, timeout=20.0):
    ws = tmp_path / "ws-run"
    (ws / "services").mkdir(parents=True)
    service = ws / "services" / "svc.py"
    service.write_bytes(code)
    artifact = ws / "artifact_000.csv"
    artifact.write_bytes(CSV_DATA)
    cfg = ExecutorConfig(step_timeout=timeout, timeout_grace=1.0,
                         retry_base_delay=0.0, workspace_base=tmp_path)
    return run_step(make_step(), artifact, ws, SubprocessSandbox(), service, cfg)


def test_run_step_success(tmp_path):
    result = run_one(tmp_path, fx.PASSTHROUGH)
    assert result.outcome == "success"
    assert result.output_artifact is not None
    assert Path(result.output_artifact).read_bytes() == CSV_DATA


def test_run_step_timeout_enforced(tmp_path):
    t0 = time.monotonic()
    result = run_one(tmp_path, fx.INFINITE_LOOP, timeout=2.0)
    elapsed = time.monotonic() - t0
    assert result.outcome == "timed_out"
    assert result.error_kind == "timeout"
    assert elapsed < 2.0 + 1.0 + 0.5  # timeout + grace + spawn slack


def test_run_step_missing_output(tmp_path):
    result = run_one(tmp_path, fx.NO_OUTPUT)
    assert result.outcome == "failed"
    assert result.error_kind == "missing_output"
    assert result.output_artifact is None


def test_run_step_nonzero_exit_captures_stderr(tmp_path):
    result = run_one(tmp_path, fx.CRASHER)
    assert result.outcome == "failed"
    assert result.error_kind == "nonzero_exit"
    assert "deliberate failure" in result.stderr


def test_run_step_memory_cap_enforced_on_posix(tmp_path):
    import resource  # POSIX-only; the cap is documented as best-effort elsewhere
    ws = tmp_path / "ws-mem"
    (ws / "services").mkdir(parents=True)
    service = ws / "services" / "hog.py"
    service.write_bytes(fx.MEMORY_HOG)
    artifact = ws / "artifact_000.csv"
    artifact.write_bytes(CSV_DATA)
    cfg = ExecutorConfig(step_timeout=20.0, retry_base_delay=0.0, workspace_base=ws)
    sandbox = SubprocessSandbox(memory_cap_bytes=128 * 1024 * 1024)
    result = run_step(make_step(), artifact, ws, sandbox, service, cfg)
    assert result.outcome == "failed"
    assert "MemoryError" in result.stderr
    assert RegexFaultClassifier().classify(result) == "resource_exhaustion"


# --- fault classification -----------------------------------------------------------

def fail_result(stderr="", error_kind="nonzero_exit"):
    return StepResult(step_order=1, microservice_id="m", attempt_count=4,
                      outcome="failed", stdout="", stderr=stderr, duration=0.1,
                      output_artifact=None, error_kind=error_kind)


@pytest.mark.parametrize("stderr,expected", [
    ("TypeError: expected DataFrame got array", "type_mismatch"),
    ("KeyError: 'target'", "missing_parameter"),
    ("missing required parameter: target column", "missing_parameter"),
    ("OverflowError: math range error", "numeric_instability"),
    ("result is NaN after division", "numeric_instability"),
    ("MemoryError", "resource_exhaustion"),
    ("something inscrutable", "unknown"),
])
def test_fault_classifier(stderr, expected):
    assert RegexFaultClassifier().classify(fail_result(stderr)) == expected


def test_fault_classifier_timeout_outcome():
    result = fail_result("", error_kind="timeout")
    assert RegexFaultClassifier().classify(result) == "resource_exhaustion"


# --- self_heal -------------------------------------------------------------------------

def heal_catalog():
    services = [
        make_service("A", "alt a", "first option", input_formats=("csv",)),
        make_service("B", "alt b", "second option", input_formats=("json",)),
        make_service("C", "alt c", "third option", input_formats=("csv",)),
    ]
    rec, store, *_ = make_recommender(services)
    return store


def test_self_heal_excludes_tried_and_takes_argmax():
    store = heal_catalog()
    ranked = [("A", 0.9), ("B", 0.8), ("C", 0.7)]
    chosen = self_heal(make_step(), {"A"}, fail_result("boom"), ranked, store)
    assert chosen == "B"


def test_self_heal_exhaustion_returns_none():
    store = heal_catalog()
    ranked = [("A", 0.9), ("B", 0.8)]
    assert self_heal(make_step(), {"A", "B"}, fail_result("boom"), ranked, store) is None


def test_self_heal_type_mismatch_requires_format_compat():
    # B outranks C but only accepts json; fault class filters it out.
    store = heal_catalog()
    ranked = [("A", 0.9), ("B", 0.8), ("C", 0.7)]
    error = fail_result("TypeError: expected csv format")
    chosen = self_heal(make_step(), {"A"}, error, ranked, store)
    assert chosen == "C"


def test_self_heal_resource_exhaustion_prefers_low_memory():
    services = [
        make_service("A", "alt a", "first", input_formats=("csv",)),
        make_service("B", "alt b", "second", input_formats=("csv",),
                     capabilities=("high-memory",)),
        make_service("C", "alt c", "third", input_formats=("csv",)),
    ]
    rec, store, *_ = make_recommender(services)
    ranked = [("A", 0.9), ("B", 0.8), ("C", 0.7)]
    error = fail_result("", error_kind="timeout")
    assert self_heal(make_step(), {"A"}, error, ranked, store) == "C"


# --- execute ---------------------------------------------------------------------------

def test_execute_three_step_passthrough(tmp_path):
    pipeline, rec, patterns, prof = build_ready_pipeline(three_stage_services())
    record = execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                     config=fast_config(tmp_path))
    assert record.final_status == "completed"
    assert pipeline.status == "completed"
    assert [r.outcome for r in record.step_results] == ["success"] * 3
    ws = Path(record.workspace)
    artifacts = sorted(p.name for p in ws.glob("artifact_*.csv"))
    assert artifacts == ["artifact_000.csv", "artifact_001.csv",
                         "artifact_002.csv", "artifact_003.csv"]
    assert (ws / "artifact_003.csv").read_bytes() == CSV_DATA


def test_execute_fail_fast_no_alternatives(tmp_path):
    # The evaluator always crashes, and the other services enforce their own
    # stage params so neither can stand in for evaluation: every indexed
    # candidate gets tried and the pipeline fails at step 2.
    services = [
        make_service("train-1", "trainer", "trains models",
                     capabilities=("model training",), code=fx.STRICT_TRAINER),
        make_service("eval-1", "evaluator", "evaluates models",
                     capabilities=("model evaluation",), code=fx.CRASHER),
        make_service("report-1", "reporter", "writes reports",
                     capabilities=("reporting",), code=fx.STRICT_REPORTER),
    ]
    pipeline, rec, patterns, prof = build_ready_pipeline(services)
    record = execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                     config=fast_config(tmp_path))
    assert record.final_status == "failed"
    assert pipeline.status == "failed"
    # Diagnostics from the original failure are preserved; it burned its full
    # retry budget before self-healing kicked in.
    eval_results = [r for r in record.step_results if r.step_order == 2]
    assert "deliberate failure" in eval_results[0].stderr
    assert eval_results[0].attempt_count == 4
    # All viable alternatives were tried and failed; none substituted.
    tried_ids = {r.microservice_id for r in eval_results}
    assert tried_ids == {"eval-1", "train-1", "report-1"}
    assert record.substitutions == []
    # Step 3 never started.
    assert not any(r.step_order == 3 for r in record.step_results)


def test_execute_isolated_workspaces(tmp_path):
    pipeline, rec, patterns, prof = build_ready_pipeline(three_stage_services())
    r1 = execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                 config=fast_config(tmp_path))
    pipeline.status = "ready"
    for step in pipeline.steps:
        step.status = "pending"
    r2 = execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                 config=fast_config(tmp_path))
    assert r1.workspace != r2.workspace


def test_execute_self_heals_with_substitute(tmp_path):
    # Two trainer candidates: the type-crasher ranks first (name matches the
    # stage query harder), the healthy twin substitutes in.
    services = [
        make_service("train-bad", "churn model training trainer",
                     "trains churn models with training",
                     capabilities=("model training",), code=fx.TYPE_CRASHER),
        make_service("train-ok", "backup trainer", "trains models",
                     capabilities=("model training",), code=fx.PASSTHROUGH),
        make_service("eval-1", "model evaluator", "computes accuracy",
                     capabilities=("model evaluation",), code=fx.PASSTHROUGH),
        make_service("report-1", "report writer", "writes reports",
                     capabilities=("reporting",), code=fx.PASSTHROUGH),
    ]
    pipeline, rec, patterns, prof = build_ready_pipeline(services)
    assert pipeline.steps[0].microservice_id == "train-bad"
    record = execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                     config=fast_config(tmp_path))
    assert record.final_status == "completed"
    assert ("model_training", "train-bad", "train-ok") in record.substitutions
    assert pipeline.steps[0].microservice_id == "train-ok"
    assert pipeline.steps[0].status == "substituted"


def test_execute_substitution_soundness(tmp_path):
    services = [
        make_service("train-bad", "churn model training trainer",
                     "trains churn models with training",
                     capabilities=("model training",), code=fx.CRASHER),
        make_service("train-ok", "backup trainer", "trains models",
                     capabilities=("model training",), code=fx.PASSTHROUGH),
        make_service("eval-1", "model evaluator", "computes accuracy",
                     capabilities=("model evaluation",), code=fx.PASSTHROUGH),
        make_service("report-1", "report writer", "writes reports",
                     capabilities=("reporting",), code=fx.PASSTHROUGH),
    ]
    pipeline, rec, patterns, prof = build_ready_pipeline(services)
    record = execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                     config=fast_config(tmp_path))
    for stage, original, substitute in record.substitutions:
        assert substitute != original
        ranked = rec.rank_stage(stage, pipeline.intent, prof)
        assert substitute in [c[0] for c in ranked.candidates]


def test_execute_requires_ready(tmp_path):
    pipeline, rec, patterns, prof = build_ready_pipeline(three_stage_services())
    pipeline.status = "draft"
    with pytest.raises(ExecutorError):
        execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                config=fast_config(tmp_path))


def test_execute_pattern_linkage_one_record_per_step(tmp_path):
    pipeline, rec, patterns, prof = build_ready_pipeline(three_stage_services())
    execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
            config=fast_config(tmp_path))
    assert len(patterns.traces()) == len(pipeline.steps)
    for trace, step in zip(patterns.traces(), pipeline.steps):
        assert trace.outcome == "success"
        assert trace.stage == step.stage
        assert trace.position == step.order


def test_execute_confinement(tmp_path):
    outside = tmp_path / "outside"
    outside.mkdir()
    (outside / "sentinel.txt").write_text("untouched")

    def snapshot(root: Path):
        return {
            str(p.relative_to(root)): (p.stat().st_size if p.is_file() else None)
            for p in sorted(root.rglob("*"))
        }

    before = snapshot(outside)
    ws_base = tmp_path / "ws"
    pipeline, rec, patterns, prof = build_ready_pipeline(three_stage_services())
    record = execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
                     config=fast_config(tmp_path))
    assert snapshot(outside) == before
    # Everything written during the run lives under the workspace root.
    ws_root = Path(record.workspace)
    for p in ws_base.rglob("*"):
        assert ws_root in (p, *p.parents)


def test_execute_status_transitions_committed(tmp_path):
    pipeline, rec, patterns, prof = build_ready_pipeline(three_stage_services())
    seen = []
    execute(pipeline, CSV_DATA, SubprocessSandbox(), rec, patterns, prof,
            config=fast_config(tmp_path),
            status_callback=lambda p: seen.append(
                (p.status, tuple(s.status for s in p.steps))))
    assert seen[0] == ("running", ("pending", "pending", "pending"))
    assert ("running", ("running", "pending", "pending")) in seen
    assert seen[-1] == ("completed", ("succeeded", "succeeded", "succeeded"))
