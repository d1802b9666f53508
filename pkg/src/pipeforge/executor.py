"""Pipeline executor: isolated workspaces, sandboxed steps, self-healing.

Each run gets a fresh workspace directory named after the pipeline id plus a
timestamp; the dataset is copied in as artifact zero and every step consumes
the previous step's artifact. Steps run as subprocesses under a wall-clock
timeout with stdout/stderr capture. A failed step is retried with exponential
backoff; once retries are exhausted the executor classifies the error and
substitutes the best untried candidate for the same stage, resuming from the
same input artifact. Only when no viable alternative remains is the pipeline
marked failed, with diagnostics preserved.

Microservice calling convention (bit-exact contract): the service is invoked
as a process with  --input <path> --output <path> --params <path-to-json>,
must exit 0 and write the output file on success.
"""

from __future__ import annotations

import json
import os
import re
import signal
import subprocess
import sys
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, List, Optional, Set, Tuple

from .builder import Pipeline, PipelineStep
from .errors import ExecutorError, WorkspaceCreationFailed
from .patterns import ExecutionTrace, PatternStore
from .profiler import DataProfile

FAULT_CLASSES = ("type_mismatch", "missing_parameter", "numeric_instability",
                 "resource_exhaustion")

_FAULT_RULES_PATH = Path(__file__).parent / "data" / "fault_rules.json"

_FORMAT_EXT = {"csv": "csv", "tsv": "tsv", "json": "json", "json_records": "json"}

OUTPUT_CAP_BYTES = 1 * 1024 * 1024  # stdout/stderr capture cap per stream


@dataclass(frozen=True)
class ExecutorConfig:
    step_timeout: float = 300.0
    timeout_grace: float = 1.0
    max_retries: int = 3          # failed attempts before self-healing
    retry_base_delay: float = 1.0
    workspace_base: Path = Path("workspaces")
    memory_cap_bytes: Optional[int] = None  # enforced on POSIX, ignored elsewhere


@dataclass(frozen=True)
class SandboxResult:
    exit_code: Optional[int]
    stdout: str
    stderr: str
    duration: float
    timed_out: bool


class SubprocessSandbox:
    """Default runner: subprocess with cwd confinement and wall-clock timeout.

    The child runs in its own session so the whole process group can be
    killed when the timeout fires. Output is truncated at OUTPUT_CAP_BYTES.
    Address-space caps are applied via rlimit on POSIX and silently skipped
    on platforms without the resource module; a container-based sandbox can
    be swapped in behind the same run() signature for hard isolation.
    """

    def __init__(self, memory_cap_bytes: Optional[int] = None):
        self.memory_cap_bytes = memory_cap_bytes

    def _preexec(self):
        if self.memory_cap_bytes is None:
            return None
        try:
            import resource
        except ImportError:  # non-POSIX: monitored elsewhere, not enforced
            return None
        cap = self.memory_cap_bytes

        def set_limits():
            resource.setrlimit(resource.RLIMIT_AS, (cap, cap))
        return set_limits

    def run(self, argv: List[str], cwd: Path, timeout: float,
            grace: float = 1.0) -> SandboxResult:
        start = time.monotonic()
        try:
            proc = subprocess.Popen(
                argv, cwd=str(cwd),
                stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                start_new_session=True,
                preexec_fn=self._preexec(),
                env={"PATH": os.environ.get("PATH", "/usr/bin:/bin"),
                     "PYTHONDONTWRITEBYTECODE": "1",
                     "HOME": str(cwd)},
            )
        except OSError as exc:
            return SandboxResult(exit_code=None, stdout="", stderr=f"spawn failed: {exc}",
                                 duration=time.monotonic() - start, timed_out=False)
        timed_out = False
        try:
            out, err = proc.communicate(timeout=timeout)
        except subprocess.TimeoutExpired:
            timed_out = True
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except (ProcessLookupError, PermissionError):
                proc.kill()
            try:
                out, err = proc.communicate(timeout=grace)
            except subprocess.TimeoutExpired:
                out, err = b"", b"process did not terminate within grace period"
        duration = time.monotonic() - start
        return SandboxResult(
            exit_code=None if timed_out else proc.returncode,
            stdout=out[:OUTPUT_CAP_BYTES].decode("utf-8", errors="replace"),
            stderr=err[:OUTPUT_CAP_BYTES].decode("utf-8", errors="replace"),
            duration=duration,
            timed_out=timed_out,
        )


@dataclass
class StepResult:
    step_order: int
    microservice_id: str
    attempt_count: int
    outcome: str  # success | failed | timed_out
    stdout: str
    stderr: str
    duration: float
    output_artifact: Optional[str]
    error_kind: Optional[str] = None  # nonzero_exit | timeout | missing_output | sandbox_error

    def to_dict(self) -> dict:
        return {
            "step_order": self.step_order,
            "microservice_id": self.microservice_id,
            "attempt_count": self.attempt_count,
            "outcome": self.outcome,
            "stdout": self.stdout,
            "stderr": self.stderr,
            "duration": self.duration,
            "output_artifact": self.output_artifact,
            "error_kind": self.error_kind,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StepResult":
        return cls(**d)


@dataclass
class RunRecord:
    pipeline_id: str
    user_id: str
    step_results: List[StepResult]
    final_status: str  # completed | failed
    substitutions: List[tuple]  # (stage, original id, substitute id)
    started_at: str
    ended_at: str
    workspace: str
    selection_mode: str = "autonomous"  # autonomous | interactive | autonomous_fallback

    def to_dict(self) -> dict:
        return {
            "pipeline_id": self.pipeline_id,
            "user_id": self.user_id,
            "step_results": [r.to_dict() for r in self.step_results],
            "final_status": self.final_status,
            "substitutions": [list(s) for s in self.substitutions],
            "started_at": self.started_at,
            "ended_at": self.ended_at,
            "workspace": self.workspace,
            "selection_mode": self.selection_mode,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            pipeline_id=d["pipeline_id"],
            user_id=d["user_id"],
            step_results=[StepResult.from_dict(r) for r in d["step_results"]],
            final_status=d["final_status"],
            substitutions=[tuple(s) for s in d["substitutions"]],
            started_at=d["started_at"],
            ended_at=d["ended_at"],
            workspace=d.get("workspace", ""),
            selection_mode=d.get("selection_mode", "autonomous"),
        )


# ---------------------------------------------------------------------------
# Retry policy
# ---------------------------------------------------------------------------

def retry_policy(error_kind: str, attempt: int,
                 base_delay: float = 1.0, max_retries: int = 3) -> Tuple[str, Optional[float]]:
    """After the attempt-th failure: retry with exponential backoff for the
    first max_retries failures, then escalate to self-healing."""
    if attempt < 1:
        raise ValueError("attempt counts from 1")
    if attempt <= max_retries:
        return ("retry", base_delay * (2 ** (attempt - 1)))
    return ("escalate", None)


# ---------------------------------------------------------------------------
# Fault classification
# ---------------------------------------------------------------------------

class RegexFaultClassifier:
    """Deterministic stderr-pattern classifier; rules shipped as a data file."""

    provider_id = "regex-faults/1"

    def __init__(self, path: Path = _FAULT_RULES_PATH):
        raw = json.loads(path.read_text(encoding="utf-8"))
        self.rules = [(re.compile(r["regex"]), r["fault_class"]) for r in raw["rules"]]

    def classify(self, result: StepResult) -> str:
        if result.error_kind == "timeout":
            return "resource_exhaustion"
        text = f"{result.stderr}\n{result.stdout}"
        for regex, fault_class in self.rules:
            if regex.search(text):
                return fault_class
        return "unknown"


# ---------------------------------------------------------------------------
# Workspace + step execution
# ---------------------------------------------------------------------------

def _artifact_ext(fmt: str) -> str:
    return _FORMAT_EXT.get(fmt, "dat")


def create_workspace(base: Path, pipeline_id: str) -> Path:
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S")
    root = Path(base) / f"{pipeline_id}-{stamp}-{uuid.uuid4().hex[:6]}"
    try:
        root.mkdir(parents=True, exist_ok=False)
        (root / "services").mkdir()
    except OSError as exc:
        raise WorkspaceCreationFailed(str(exc)) from exc
    return root


def materialize_service(workspace: Path, ms) -> Path:
    path = workspace / "services" / f"{ms.id}.py"
    if not path.exists():
        path.write_bytes(ms.submission.code)
    return path


def run_step(step: PipelineStep, input_artifact: Path, workspace: Path,
             sandbox, service_path: Path,
             config: ExecutorConfig = ExecutorConfig()) -> StepResult:
    """Invoke one microservice under the fixed calling convention."""
    if not input_artifact.exists():
        raise ExecutorError(f"input artifact missing: {input_artifact}")
    params_path = workspace / f"params_{step.order:03d}.json"
    params_path.write_text(json.dumps(step.params, sort_keys=True), encoding="utf-8")
    output_path = workspace / (
        f"artifact_{step.order:03d}.{_artifact_ext(step.expected_output_format)}")
    if output_path.exists():
        output_path.unlink()  # stale artifact from a prior failed attempt
    argv = [sys.executable, str(service_path),
            "--input", str(input_artifact),
            "--output", str(output_path),
            "--params", str(params_path)]
    result = sandbox.run(argv, cwd=workspace, timeout=config.step_timeout,
                         grace=config.timeout_grace)

    if result.timed_out:
        outcome, error_kind = "timed_out", "timeout"
    elif result.exit_code is None:
        outcome, error_kind = "failed", "sandbox_error"
    elif result.exit_code != 0:
        outcome, error_kind = "failed", "nonzero_exit"
    elif not output_path.exists():
        outcome, error_kind = "failed", "missing_output"
    else:
        outcome, error_kind = "success", None

    return StepResult(
        step_order=step.order,
        microservice_id=step.microservice_id,
        attempt_count=1,
        outcome=outcome,
        stdout=result.stdout,
        stderr=result.stderr,
        duration=result.duration,
        output_artifact=str(output_path) if outcome == "success" else None,
        error_kind=error_kind,
    )


# ---------------------------------------------------------------------------
# Self-healing
# ---------------------------------------------------------------------------

def self_heal(step: PipelineStep, tried: Set[str], error: StepResult,
              stage_candidates: List[Tuple[str, float]], catalog,
              classifier=None) -> Optional[str]:
    """Best untried candidate for the failed stage, filtered by fault class.

    type_mismatch requires the candidate to accept the step's input format;
    resource_exhaustion prefers candidates without a high-memory tag. Returns
    None when no viable alternative remains.
    """
    classifier = classifier or RegexFaultClassifier()
    fault = classifier.classify(error)
    remaining = [(cid, score) for cid, score in stage_candidates if cid not in tried]
    if not remaining:
        return None

    if fault == "type_mismatch":
        def accepts_input(cid: str) -> bool:
            analysis = catalog.get(cid).analysis
            return bool(analysis and step.expected_input_format in analysis.input_formats)
        remaining = [c for c in remaining if accepts_input(c[0])]
    elif fault == "resource_exhaustion":
        def low_memory(cid: str) -> bool:
            analysis = catalog.get(cid).analysis
            return not (analysis and "high-memory" in analysis.capabilities)
        light = [c for c in remaining if low_memory(c[0])]
        if light:
            remaining = light

    if not remaining:
        return None
    # stage_candidates arrive ranked (composite desc, id asc); keep that order.
    return remaining[0][0]


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _run_episode(step: PipelineStep, ms, input_artifact: Path, workspace: Path,
                 sandbox, config: ExecutorConfig) -> StepResult:
    """One microservice's full attempt budget (initial try + retries)."""
    service_path = materialize_service(workspace, ms)
    attempt = 0
    while True:
        attempt += 1
        result = run_step(step, input_artifact, workspace, sandbox, service_path, config)
        result.attempt_count = attempt
        result.microservice_id = ms.id
        if result.outcome == "success":
            return result
        action, delay = retry_policy(result.error_kind, attempt,
                                     base_delay=config.retry_base_delay,
                                     max_retries=config.max_retries)
        if action == "escalate":
            return result
        if delay:
            time.sleep(delay)


def execute(pipeline: Pipeline, dataset: bytes, sandbox, recommender,
            patterns: PatternStore, profile: DataProfile,
            config: ExecutorConfig = ExecutorConfig(), user_id: str = "default",
            classifier=None, healing_enabled: bool = True,
            status_callback: Optional[Callable[[Pipeline], None]] = None) -> RunRecord:
    """Run a ready pipeline start to finish; see module docstring."""
    if pipeline.status != "ready":
        raise ExecutorError(f"pipeline {pipeline.id} is {pipeline.status}, not ready")
    commit = status_callback or (lambda p: None)
    catalog = recommender.catalog
    classifier = classifier or RegexFaultClassifier()
    workspace = create_workspace(config.workspace_base, pipeline.id)
    started = _utc_now()

    ext = _artifact_ext({"csv": "csv", "tsv": "tsv", "json_records": "json"}.get(
        profile.format, profile.format))
    current_artifact = workspace / f"artifact_000.{ext}"
    current_artifact.write_bytes(dataset)

    pipeline.status = "running"
    commit(pipeline)

    step_results: List[StepResult] = []
    substitutions: List[tuple] = []
    traces: List[ExecutionTrace] = []
    final_status = "completed"

    def record_trace(ms_id: str, stage: str, outcome: str, position: int) -> None:
        trace = ExecutionTrace(
            user_id=user_id, pipeline_id=pipeline.id, stage=stage,
            microservice_id=ms_id, outcome=outcome, timestamp=_utc_now(),
            position=position)
        traces.append(trace)
        patterns.record(trace)

    for step in pipeline.steps:
        step.status = "running"
        commit(pipeline)

        ms = catalog.get(step.microservice_id)
        result = _run_episode(step, ms, current_artifact, workspace, sandbox, config)
        step_results.append(result)

        if result.outcome == "success":
            record_trace(ms.id, step.stage, "success", step.order)
            step.status = "succeeded"
            commit(pipeline)
            current_artifact = Path(result.output_artifact)
            continue

        # Original episode failed terminally: demote it, then self-heal.
        record_trace(ms.id, step.stage, "failure", step.order)
        healed = False
        if healing_enabled:
            ranked = recommender.rank_stage(step.stage, pipeline.intent, profile,
                                            user_id=user_id)
            stage_candidates = [(cid, bd.composite) for cid, bd in ranked.candidates]
            tried = {ms.id}
            last_error = result
            while True:
                substitute_id = self_heal(step, tried, last_error, stage_candidates,
                                          catalog, classifier=classifier)
                if substitute_id is None:
                    break
                tried.add(substitute_id)
                substitute = catalog.get(substitute_id)
                from .builder import infer_params  # late import avoids a cycle
                step.params = infer_params(substitute, step.stage, pipeline.intent,
                                           profile)
                sub_result = _run_episode(step, substitute, current_artifact,
                                          workspace, sandbox, config)
                step_results.append(sub_result)
                if sub_result.outcome == "success":
                    record_trace(substitute_id, step.stage, "success", step.order)
                    substitutions.append((step.stage, ms.id, substitute_id))
                    step.microservice_id = substitute_id
                    step.status = "substituted"
                    commit(pipeline)
                    current_artifact = Path(sub_result.output_artifact)
                    healed = True
                    break
                record_trace(substitute_id, step.stage, "failure", step.order)
                last_error = sub_result

        if not healed:
            step.status = "failed"
            final_status = "failed"
            commit(pipeline)
            break

    pipeline.status = "completed" if final_status == "completed" else "failed"
    commit(pipeline)

    return RunRecord(
        pipeline_id=pipeline.id,
        user_id=user_id,
        step_results=step_results,
        final_status=final_status,
        substitutions=substitutions,
        started_at=started,
        ended_at=_utc_now(),
        workspace=str(workspace),
    )
