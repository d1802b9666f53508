"""Evaluation protocols: cold start, doc degradation, temporal, failure injection.

Each protocol builds fresh engines from the generated suite under one of the
four ablation configurations and reports success rate, timing percentiles,
per-stage selection accuracy and protocol-specific sections. Outcome fields
are deterministic for a fixed (seed, config, protocol); wall-clock timings
are inherently not and are excluded from the reproducibility digest.
"""

from __future__ import annotations

import hashlib
import json
import statistics
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..catalog import DocOnlyAnalyzer
from ..errors import PipeforgeError, UnknownProtocol
from ..executor import SandboxResult, SubprocessSandbox
from ..gateway.engine import Engine, EngineConfig
from ..patterns import ExecutionTrace
from ..recommender import DEFAULT_WEIGHTS, SEMANTIC_ONLY_WEIGHTS
from .suite import FIXED_TS, BenchTask, Suite, generate_suite

PROTOCOLS = ("cold_start", "doc_degradation", "temporal", "failure_injection")

FAULT_CLASSES = ("type_mismatch", "missing_parameter", "numeric_instability",
                 "resource_exhaustion")

_FAULT_STDERR = {
    "type_mismatch": "TypeError: expected csv format, received serialized frame",
    "missing_parameter": "KeyError: missing required parameter: target column",
    "numeric_instability": "OverflowError: overflow encountered, result is NaN",
    "resource_exhaustion": "MemoryError: out of memory while buffering rows",
}


@dataclass(frozen=True)
class BenchConfig:
    analysis_mode: str  # code_grounded | doc_based
    scoring: str        # hybrid | semantic_only
    history: str        # enabled | disabled

    def to_dict(self) -> dict:
        return {"analysis_mode": self.analysis_mode, "scoring": self.scoring,
                "history": self.history}


BENCH_CONFIGS = {
    "A": BenchConfig("code_grounded", "hybrid", "enabled"),
    "B": BenchConfig("code_grounded", "hybrid", "disabled"),
    "C": BenchConfig("doc_based", "hybrid", "enabled"),
    "D": BenchConfig("code_grounded", "semantic_only", "disabled"),
}


@dataclass
class BenchReport:
    protocol: str
    config: dict
    seed: int
    task_count: int
    completed: int
    success_rate: float
    median_time: float
    p90_time: float
    selection_accuracy: Optional[float]
    sections: dict
    deltas: dict

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "config": self.config,
            "seed": self.seed,
            "task_count": self.task_count,
            "completed": self.completed,
            "success_rate": self.success_rate,
            "median_time": self.median_time,
            "p90_time": self.p90_time,
            "selection_accuracy": self.selection_accuracy,
            "sections": self.sections,
            "deltas": self.deltas,
        }

    _TIMING_KEYS = ("median_time", "p90_time", "added_latency_seconds",
                    "median_time_injected", "median_time_clean")

    def deterministic_digest(self) -> str:
        """Hash of the outcome fields, timing excluded (wall clock varies)."""
        def strip(obj):
            if isinstance(obj, dict):
                return {k: strip(v) for k, v in sorted(obj.items())
                        if k not in self._TIMING_KEYS}
            if isinstance(obj, list):
                return [strip(v) for v in obj]
            return obj
        blob = json.dumps(strip(self.to_dict()), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()

    def summary(self) -> str:
        lines = [
            f"protocol            {self.protocol}",
            f"config              {self.config}",
            f"seed                {self.seed}",
            f"tasks               {self.completed}/{self.task_count} completed "
            f"({self.success_rate:.1%})",
            f"time-to-results     median {self.median_time:.2f}s, p90 {self.p90_time:.2f}s",
        ]
        if self.selection_accuracy is not None:
            lines.append(f"selection accuracy  {self.selection_accuracy:.1%}")
        for name, section in self.sections.items():
            lines.append(f"[{name}]")
            for key, value in section.items():
                lines.append(f"  {key:<28} {value}")
        if self.deltas:
            lines.append("[paired comparisons]")
            for key, value in self.deltas.items():
                lines.append(f"  {key:<28} {value}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Engine wiring per configuration
# ---------------------------------------------------------------------------

def _engine_for(config: BenchConfig, suite: Suite, work_dir: Path,
                severity: str = "none", seed_history: bool = True,
                healing_enabled: bool = True, history_seed: int = 0) -> Engine:
    store_dir = Path(work_dir) / f"engine-{uuid.uuid4().hex[:8]}"
    engine = Engine(EngineConfig(
        store_dir=store_dir,
        weights=DEFAULT_WEIGHTS if config.scoring == "hybrid" else SEMANTIC_ONLY_WEIGHTS,
        step_timeout=30.0,
        retry_base_delay=0.0,
        healing_enabled=healing_enabled,
        history_enabled=config.history == "enabled",
        analysis_provider=DocOnlyAnalyzer() if config.analysis_mode == "doc_based" else None,
    ))
    for spec in suite.services:
        ms = engine.upload(spec.submission(severity), auto_publish=False)
        if ms.state != "analyzed":
            raise PipeforgeError(f"suite service {spec.id} failed validation: "
                                 f"{ms.validation}")
        # Re-key to the stable suite id so references stay comparable.
        engine.catalog._items[spec.id] = engine.catalog._items.pop(ms.id)
        ms.id = spec.id
        engine.publish_microservice(spec.id)
    if seed_history and config.history == "enabled":
        _seed_history(engine, suite, history_seed)
    return engine


def _seed_history(engine: Engine, suite: Suite, history_seed: int) -> None:
    """Synthetic prior evidence at each service's home stage. Reference
    services model the popular, battle-tested core and get heavier usage."""
    import random
    rng = random.Random(history_seed)
    for spec in sorted(suite.services, key=lambda s: s.id):
        if spec.zero_history:
            continue
        successes = rng.randint(60, 90) if spec.popular else rng.randint(10, 40)
        for i in range(successes):
            engine.patterns.record(ExecutionTrace(
                user_id="seed", pipeline_id=f"seed-{spec.id}-{i}",
                stage=spec.natural_stage, microservice_id=spec.id,
                outcome="success", timestamp=FIXED_TS, position=1))


# ---------------------------------------------------------------------------
# Task running
# ---------------------------------------------------------------------------

@dataclass
class TaskOutcome:
    task_id: str
    completed: bool
    duration: float
    selection: Dict[str, str]
    reference: Dict[str, str]
    substitutions: List[tuple]
    error: Optional[str] = None

    @property
    def stage_matches(self) -> Tuple[int, int]:
        hits = sum(1 for stage, ref in self.reference.items()
                   if self.selection.get(stage) == ref)
        return hits, len(self.reference)


def _run_tasks(engine: Engine, tasks: List[BenchTask], parallel: bool,
               execute: bool = True) -> List[TaskOutcome]:
    """Run tasks in order, or on a small thread pool for order-free protocols;
    results always come back in task order."""
    if not parallel:
        return [_run_task(engine, t, execute=execute) for t in tasks]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=4) as pool:
        return list(pool.map(lambda t: _run_task(engine, t, execute=execute), tasks))


def _run_task(engine: Engine, task: BenchTask, execute: bool = True,
              user: str = "bench") -> TaskOutcome:
    start = time.perf_counter()
    try:
        dataset_id, _prof = engine.add_dataset(f"{task.id}.csv", task.dataset)
        pipeline, validation, _recs = engine.create_pipeline(
            dataset_id, task.goal, mode="autonomous", user=user)
        selection = {s.stage: s.microservice_id for s in pipeline.steps}
        if not execute:
            return TaskOutcome(task.id, True, time.perf_counter() - start,
                               selection, task.reference_pipeline, [])
        job = engine.execute_pipeline(pipeline.id, user=user, background=False)
        runs = engine.runs_for(pipeline.id)
        record = runs[-1]
        return TaskOutcome(
            task_id=task.id,
            completed=job["state"] == "done" and record["final_status"] == "completed",
            duration=time.perf_counter() - start,
            selection=selection,
            reference=task.reference_pipeline,
            substitutions=[tuple(s) for s in record["substitutions"]],
            error=job.get("error_detail"),
        )
    except PipeforgeError as exc:
        return TaskOutcome(task.id, False, time.perf_counter() - start, {},
                           task.reference_pipeline, [],
                           error=f"{getattr(exc, 'agent', 'engine')}: {exc}")


def _selection_accuracy(outcomes: List[TaskOutcome]) -> Optional[float]:
    hits = total = 0
    for outcome in outcomes:
        h, t = outcome.stage_matches
        hits += h
        total += t
    return hits / total if total else None


def _timing(outcomes: List[TaskOutcome]) -> Tuple[float, float]:
    times = sorted(o.duration for o in outcomes)
    if not times:
        return 0.0, 0.0
    median = statistics.median(times)
    p90 = times[min(len(times) - 1, int(0.9 * (len(times) - 1) + 0.5))]
    return median, p90


def _paired_p_value(a: List[float], b: List[float]) -> Optional[float]:
    """Paired t-test p-value; None when the differences are degenerate."""
    if len(a) != len(b) or len(a) < 2:
        return None
    diffs = [x - y for x, y in zip(a, b)]
    if len(set(diffs)) == 1:
        return None
    from scipy import stats
    result = stats.ttest_rel(a, b)
    p = float(result.pvalue)
    return None if p != p else p  # NaN -> None


# ---------------------------------------------------------------------------
# Fault injection sandbox
# ---------------------------------------------------------------------------

class FaultInjectingSandbox:
    """Deterministic wrapper: invocations of planned services fail with a
    canned fault signature instead of running; everything else passes through."""

    def __init__(self, plan: Dict[str, str], inner=None):
        self.plan = plan
        self.inner = inner or SubprocessSandbox()

    def run(self, argv, cwd, timeout, grace=1.0) -> SandboxResult:
        service_id = Path(argv[1]).stem
        fault = self.plan.get(service_id)
        if fault is not None:
            return SandboxResult(exit_code=1, stdout="",
                                 stderr=_FAULT_STDERR[fault],
                                 duration=0.01, timed_out=False)
        return self.inner.run(argv, cwd, timeout, grace)


# ---------------------------------------------------------------------------
# Protocols
# ---------------------------------------------------------------------------

def _report(protocol: str, config: BenchConfig, seed: int,
            outcomes: List[TaskOutcome], sections: dict,
            deltas: Optional[dict] = None) -> BenchReport:
    completed = sum(1 for o in outcomes if o.completed)
    median, p90 = _timing(outcomes)
    return BenchReport(
        protocol=protocol,
        config=config.to_dict(),
        seed=seed,
        task_count=len(outcomes),
        completed=completed,
        success_rate=completed / len(outcomes) if outcomes else 0.0,
        median_time=median,
        p90_time=p90,
        selection_accuracy=_selection_accuracy(outcomes),
        sections=sections,
        deltas=deltas or {},
    )


def _protocol_cold_start(config: BenchConfig, suite: Suite, work_dir: Path,
                         seed: int, parallel: bool = False) -> BenchReport:
    engine = _engine_for(config, suite, work_dir, history_seed=seed)
    tasks = [t for t in suite.tasks if not t.negative_control]
    outcomes = _run_tasks(engine, tasks, parallel)
    by_id = {o.task_id: o for o in outcomes}
    cold = [t for t in tasks if t.needs_cold]
    warm = [t for t in tasks if not t.needs_cold]
    cold_rate = (sum(by_id[t.id].completed for t in cold) / len(cold)) if cold else 0.0
    warm_rate = (sum(by_id[t.id].completed for t in warm) / len(warm)) if warm else 0.0
    sections = {
        "cold_start": {
            "cold_tasks": len(cold),
            "warm_tasks": len(warm),
            "cold_success_rate": cold_rate,
            "warm_success_rate": warm_rate,
            "gap": warm_rate - cold_rate,
        }
    }
    return _report("cold_start", config, seed, outcomes, sections)


_SEVERITIES = ("none", "mild", "moderate", "severe")


def _protocol_doc_degradation(config: BenchConfig, suite: Suite, work_dir: Path,
                              seed: int, parallel: bool = False) -> BenchReport:
    tasks = [t for t in suite.tasks if not t.negative_control]
    # Selection-accuracy sweeps run under both analysis modes with history
    # disabled, so accuracy depends on content signals alone.
    sweep: dict = {}
    for mode in ("code_grounded", "doc_based"):
        mode_config = BenchConfig(mode, config.scoring, "disabled")
        accuracies = {}
        for severity in _SEVERITIES:
            engine = _engine_for(mode_config, suite, work_dir, severity=severity,
                                 seed_history=False)
            outcomes = _run_tasks(engine, tasks, parallel, execute=False)
            accuracies[severity] = _selection_accuracy(outcomes)
        sweep[mode] = accuracies

    code = sweep["code_grounded"]
    docs = sweep["doc_based"]
    sections = {
        "selection_accuracy_by_severity": sweep,
        "analysis": {
            "code_grounded_invariant": len({code[s] for s in ("mild", "moderate", "severe")}) == 1,
            "doc_based_non_increasing": all(
                docs[a] >= docs[b] - 1e-12
                for a, b in zip(_SEVERITIES, _SEVERITIES[1:])),
        },
    }
    # Headline numbers: execute the requested configuration at severity none.
    engine = _engine_for(config, suite, work_dir, history_seed=seed)
    outcomes = _run_tasks(engine, tasks, parallel)
    deltas = {
        "accuracy_drop_doc_based_severe": (docs["none"] - docs["severe"]
                                           if docs["none"] is not None else None),
    }
    return _report("doc_degradation", config, seed, outcomes, sections, deltas)


def _protocol_temporal(config: BenchConfig, suite: Suite, work_dir: Path,
                       seed: int, parallel: bool = False) -> BenchReport:
    """Cohorts run in order; history accumulates only from earlier cohorts."""
    engine = _engine_for(config, suite, work_dir, seed_history=False)
    cohorts: dict = {}
    outcomes: List[TaskOutcome] = []
    success_snapshots: List[Dict[str, int]] = []
    score4_snapshots: List[Dict[str, float]] = []
    for cohort in (1, 2, 3, 4, 5):
        cohort_tasks = [t for t in suite.tasks
                        if t.cohort == cohort and not t.negative_control]
        cohort_outcomes = [_run_task(engine, t) for t in cohort_tasks]
        outcomes.extend(cohort_outcomes)
        rate = (sum(o.completed for o in cohort_outcomes) / len(cohort_outcomes)
                if cohort_outcomes else 0.0)
        snap = engine.patterns.snapshot()["global"]
        success_snapshots.append({key: counts[0] for key, counts in snap.items()})
        score4_snapshots.append({
            key: min(max(0.0, counts[0] - engine.patterns.demotion_factor * counts[1])
                     / 100.0, 1.0)
            for key, counts in snap.items()})
        cohorts[f"cohort_{cohort}"] = {"tasks": len(cohort_outcomes),
                                       "success_rate": rate}

    # Reinforced pairs: at least one fresh success in every cohort.
    final_keys = success_snapshots[-1].keys() if success_snapshots else []
    reinforced = []
    for key in sorted(final_keys):
        counts = [s.get(key, 0) for s in success_snapshots]
        if counts[0] >= 1 and all(b > a for a, b in zip(counts, counts[1:])):
            reinforced.append(key)
    trajectories = {key: [s.get(key, 0.0) for s in score4_snapshots]
                    for key in reinforced}
    rates = [cohorts[f"cohort_{c}"]["success_rate"] for c in (1, 2, 3, 4, 5)]
    all_scores = [v for snap in score4_snapshots for v in snap.values()]
    sections = {
        "temporal": {
            **cohorts,
            "reinforced_pairs": reinforced,
            "score4_trajectories": trajectories,
            "score4_strictly_increasing": bool(reinforced) and all(
                all(b > a for a, b in zip(traj, traj[1:]))
                for traj in trajectories.values()),
            "score4_all_zero": all(s == 0.0 for s in all_scores) if all_scores else True,
            "cohort5_ge_cohort1": rates[4] >= rates[0],
        }
    }
    return _report("temporal", config, seed, outcomes, sections)


def _protocol_failure_injection(config: BenchConfig, suite: Suite, work_dir: Path,
                                seed: int, parallel: bool = False) -> BenchReport:
    """Deterministic faults in 20% of runs; self-healing vs retry-only."""
    import random
    rng = random.Random(seed)
    tasks = [t for t in suite.tasks if not t.negative_control]
    injected_ids = sorted(rng.sample([t.id for t in tasks],
                                     max(1, round(0.2 * len(tasks)))))
    fault_by_task = {tid: FAULT_CLASSES[i % len(FAULT_CLASSES)]
                     for i, tid in enumerate(injected_ids)}

    def run_strategy(healing: bool):
        engine = _engine_for(config, suite, work_dir, healing_enabled=healing,
                             history_seed=seed)
        results = []
        for task in tasks:
            fault = fault_by_task.get(task.id)
            if fault is None:
                engine.config.sandbox_factory = None
                results.append((task, fault, _run_task(engine, task)))
                continue
            # Two-phase: build first to learn the selected service, then
            # execute with that service wrapped by the deterministic fault.
            dataset_id, _ = engine.add_dataset(f"{task.id}.csv", task.dataset)
            pipeline, _, _ = engine.create_pipeline(dataset_id, task.goal,
                                                    user="bench")
            target_step = pipeline.steps[0]
            plan = {target_step.microservice_id: fault}
            engine.config.sandbox_factory = lambda plan=plan: FaultInjectingSandbox(plan)
            start = time.perf_counter()
            job = engine.execute_pipeline(pipeline.id, user="bench", background=False)
            record = engine.runs_for(pipeline.id)[-1]
            outcome = TaskOutcome(
                task_id=task.id,
                completed=job["state"] == "done" and record["final_status"] == "completed",
                duration=time.perf_counter() - start,
                selection={s.stage: s.microservice_id for s in pipeline.steps},
                reference=task.reference_pipeline,
                substitutions=[tuple(s) for s in record["substitutions"]],
                error=job.get("error_detail"),
            )
            results.append((task, fault, outcome))
        return results

    healing_results = run_strategy(healing=True)
    retry_results = run_strategy(healing=False)

    def recovery_rate(results):
        injected = [o for (t, fault, o) in results if fault is not None]
        recovered = [o for o in injected if o.completed]
        return len(recovered) / len(injected) if injected else 0.0

    healing_outcomes = [o for (_t, _f, o) in healing_results]
    retry_outcomes = [o for (_t, _f, o) in retry_results]
    healing_recovery = recovery_rate(healing_results)
    retry_recovery = recovery_rate(retry_results)

    injected_durations = [o.duration for (t, f, o) in healing_results if f]
    clean_durations = [o.duration for (t, f, o) in healing_results if not f]
    added_latency = (statistics.median(injected_durations)
                     - statistics.median(clean_durations)) if injected_durations else 0.0

    healing_flags = [1.0 if o.completed else 0.0 for (t, f, o) in healing_results if f]
    retry_flags = [1.0 if o.completed else 0.0 for (t, f, o) in retry_results if f]

    substitution_lists = {
        t.id: [list(s) for s in o.substitutions]
        for (t, f, o) in healing_results if f
    }
    sections = {
        "failure_injection": {
            "injected_tasks": injected_ids,
            "faults": fault_by_task,
            "self_healing_recovery_rate": healing_recovery,
            "retry_only_recovery_rate": retry_recovery,
            "self_healing_success_rate": (sum(o.completed for o in healing_outcomes)
                                          / len(healing_outcomes)),
            "retry_only_success_rate": (sum(o.completed for o in retry_outcomes)
                                        / len(retry_outcomes)),
            "added_latency_seconds": added_latency,
            "substitutions": substitution_lists,
        }
    }
    deltas = {
        "recovery_delta": healing_recovery - retry_recovery,
        "recovery_p_value": _paired_p_value(healing_flags, retry_flags),
    }
    return _report("failure_injection", config, seed, healing_outcomes,
                   sections, deltas)


# Protocols whose completion metrics do not depend on task order. Note that
# with history enabled, per-stage selections can still vary under parallelism
# because pattern traces arrive in thread-completion order; sequential runs
# remain the fully reproducible reference.
ORDER_FREE_PROTOCOLS = ("cold_start", "doc_degradation")


def run_protocol(name: str, config: BenchConfig, seed: int = 7,
                 work_dir=None, suite: Optional[Suite] = None,
                 parallel: bool = False) -> BenchReport:
    if name not in PROTOCOLS:
        raise UnknownProtocol(f"unknown protocol: {name!r} (choose from {PROTOCOLS})")
    if parallel and name not in ORDER_FREE_PROTOCOLS:
        raise UnknownProtocol(
            f"--parallel applies only to order-free protocols {ORDER_FREE_PROTOCOLS}; "
            f"{name} runs tasks sequentially by design")
    import tempfile
    work_dir = Path(work_dir) if work_dir else Path(tempfile.mkdtemp(prefix="bench-"))
    work_dir.mkdir(parents=True, exist_ok=True)
    suite = suite or generate_suite(seed)
    runner = {
        "cold_start": _protocol_cold_start,
        "doc_degradation": _protocol_doc_degradation,
        "temporal": _protocol_temporal,
        "failure_injection": _protocol_failure_injection,
    }[name]
    return runner(config, suite, work_dir, seed, parallel=parallel)


def run_suite_end_to_end(suite: Suite, config: BenchConfig, work_dir,
                         seed: int = 7) -> Tuple[List[TaskOutcome], Engine]:
    """Run every task (negative controls included) through the gateway path."""
    engine = _engine_for(config, suite, Path(work_dir), history_seed=seed)
    outcomes = [_run_task(engine, t) for t in suite.tasks]
    return outcomes, engine


def reference_sanity_check(suite: Suite, work_dir, seed: int = 7) -> List[str]:
    """Suite self-check: every reference pipeline must run to completion under
    the full configuration with faults disabled. Returns failure descriptions."""
    from ..builder import build, validate_pipeline
    engine = _engine_for(BENCH_CONFIGS["A"], suite, Path(work_dir), history_seed=seed)
    failures = []
    for task in suite.tasks:
        if task.negative_control:
            continue
        try:
            dataset_id, prof = engine.add_dataset(f"{task.id}.csv", task.dataset)
            from ..intent import parse_goal
            intent = parse_goal(task.goal, prof)
            pipeline = build(task.reference_pipeline, intent, prof, engine.catalog,
                             goal=task.goal, owner="sanity")
            pipeline.profile_ref = dataset_id
            validation = validate_pipeline(pipeline, prof, catalog=engine.catalog)
            if not validation.passed:
                failures.append(f"{task.id}: validation {validation.errors}")
                continue
            engine._pipelines[pipeline.id] = pipeline
            engine.storage.put_pipeline(pipeline.to_dict())
            job = engine.execute_pipeline(pipeline.id, user="sanity", background=False)
            record = engine.runs_for(pipeline.id)[-1]
            if record["final_status"] != "completed":
                failures.append(f"{task.id}: run {record['final_status']}")
            elif record["substitutions"]:
                failures.append(f"{task.id}: needed substitutions "
                                f"{record['substitutions']}")
        except PipeforgeError as exc:
            failures.append(f"{task.id}: {exc}")
    return failures
