"""Engine: composes profiler -> intent -> recommender -> builder -> executor.

Owns the catalog, vector index, pattern store and persistence. All state
visible over the HTTP surface derives from the sqlite store plus the
append-only trace log, so restarts lose no terminal results: the catalog is
reloaded, the index rebuilt from composite texts and pattern statistics
replayed from the log.
"""

from __future__ import annotations

import hashlib
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from .. import catalog as catalog_mod
from ..builder import Pipeline, build, select, validate_pipeline
from ..catalog import CatalogStore, Microservice, MicroserviceSubmission
from ..errors import IllegalStateTransition, InvalidChoice, PipeforgeError
from ..executor import ExecutorConfig, RunRecord, SubprocessSandbox, execute
from ..intent import Intent, parse_goal, validate_intent
from ..patterns import PatternStore
from ..profiler import DataProfile, profile
from ..recommender import DEFAULT_WEIGHTS, Recommender, validate_weights
from .storage import Storage


@dataclass
class EngineConfig:
    store_dir: Path
    weights: tuple = DEFAULT_WEIGHTS
    top_k: int = 3
    step_timeout: float = 300.0
    timeout_grace: float = 1.0
    retry_base_delay: float = 1.0
    max_retries: int = 3
    selection_timeout: float = 600.0  # interactive wait before autonomous fallback
    api_token: Optional[str] = None
    healing_enabled: bool = True
    history_enabled: bool = True      # False -> pattern signal pinned at zero
    analysis_provider: object = None  # None -> deterministic static analyzer
    intent_provider: object = None    # None -> rule engine
    param_provider: object = None     # None -> fallback tables
    sandbox_factory: object = None    # None -> SubprocessSandbox


@dataclass
class _Awaiting:
    goal: str
    intent: Intent
    profile: DataProfile
    recommendations: dict
    deadline: float
    resolved: bool = False
    fell_back: bool = False


class Engine:
    def __init__(self, config: EngineConfig):
        self.config = config
        config.store_dir = Path(config.store_dir)
        config.store_dir.mkdir(parents=True, exist_ok=True)
        validate_weights(config.weights)

        self.storage = Storage(config.store_dir / "pipeforge.db")
        self.catalog = CatalogStore()
        from ..semindex import VectorIndex
        self.index = VectorIndex()
        self.patterns = self._restore_patterns(config.store_dir / "traces.ndjson")
        self.recommender = Recommender(self.catalog, self.index, self.patterns,
                                       weights=config.weights)
        self._pipelines: Dict[str, Pipeline] = {}
        self._profiles: Dict[str, DataProfile] = {}
        self._awaiting: Dict[str, _Awaiting] = {}
        self._executing: set = set()
        self._lock = threading.RLock()
        self._restore_state()

    # -- restoration ---------------------------------------------------------

    def _restore_patterns(self, log_path: Path) -> PatternStore:
        if not self.config.history_enabled:
            from ..patterns import DisabledPatternStore
            return DisabledPatternStore()
        store = PatternStore()
        if log_path.exists():
            store = PatternStore.replay_log(log_path)
        store.log_path = log_path
        return store

    def _restore_state(self) -> None:
        for ms_dict in self.storage.list_microservices():
            ms = Microservice.from_dict(ms_dict)
            self.catalog.add(ms)
            if ms.state == "indexed" and ms.composite_text:
                self.index.upsert(ms.id, ms.composite_text)
        for p_dict in self.storage.list_pipelines():
            pipeline = Pipeline.from_dict(p_dict)
            self._pipelines[pipeline.id] = pipeline

    # -- microservice lifecycle ------------------------------------------------

    def upload(self, submission: MicroserviceSubmission,
               auto_publish: bool = False) -> Microservice:
        """Stage, validate and (when clean) analyze a submission."""
        ms = catalog_mod.stage(self.catalog, submission)
        catalog_mod.validate(self.catalog, ms)
        if ms.state == "validated":
            catalog_mod.analyze(self.catalog, ms,
                                provider=self.config.analysis_provider)
        self.storage.put_microservice(ms.to_dict())
        if auto_publish and ms.state == "analyzed":
            return self.publish_microservice(ms.id)
        return ms

    def publish_microservice(self, ms_id: str) -> Microservice:
        ms = self.catalog.get(ms_id)
        catalog_mod.publish(self.catalog, ms, self.index)
        self.storage.put_microservice(ms.to_dict())
        return ms

    def get_microservice(self, ms_id: str) -> Microservice:
        return self.catalog.get(ms_id)

    def search_microservices(self, query: str = "", k: int = 20) -> List[dict]:
        if query:
            hits = self.index.query_text(query, k=k)
            out = []
            for ms_id, score in hits:
                entry = self.catalog.get(ms_id).to_dict()
                entry["match_score"] = score
                out.append(entry)
            return out
        return [ms.to_dict() for ms in self.catalog.list()]

    # -- datasets ------------------------------------------------------------------

    def add_dataset(self, name: str, content: bytes) -> tuple:
        dataset_id = hashlib.sha256(name.encode("utf-8") + b"\x00" + content).hexdigest()[:16]
        prof = profile(content, name)
        self.storage.put_dataset(dataset_id, name, content)
        self.storage.put_profile(dataset_id, prof.to_dict())
        self._profiles[dataset_id] = prof
        return dataset_id, prof

    def get_profile(self, dataset_id: str) -> DataProfile:
        if dataset_id in self._profiles:
            return self._profiles[dataset_id]
        stored = self.storage.get_profile(dataset_id)
        if stored is None:
            raise KeyError(dataset_id)
        prof = DataProfile.from_dict(stored)
        self._profiles[dataset_id] = prof
        return prof

    def get_dataset(self, dataset_id: str) -> tuple:
        row = self.storage.get_dataset(dataset_id)
        if row is None:
            raise KeyError(dataset_id)
        return row

    # -- intent + recommendation ------------------------------------------------------

    def parse_intent(self, goal: str, dataset_id: str):
        prof = self.get_profile(dataset_id)
        intent = parse_goal(goal, prof, provider=self.config.intent_provider)
        validation = validate_intent(intent, prof)
        return intent, validation

    def recommend(self, goal: str, dataset_id: str, k: Optional[int] = None,
                  user: str = "default"):
        prof = self.get_profile(dataset_id)
        intent = parse_goal(goal, prof, provider=self.config.intent_provider)
        recs = self.recommender.recommend(intent, prof, k=k or self.config.top_k,
                                          user_id=user)
        return intent, recs

    # -- pipeline construction -----------------------------------------------------------

    def create_pipeline(self, dataset_id: str, goal: str, mode: str = "autonomous",
                        user: str = "default", k: Optional[int] = None,
                        choices: Optional[dict] = None):
        """Profile -> intent -> recommend -> select -> build (-> validate).

        In interactive mode without upfront choices the pipeline stays draft
        until selections arrive or the timeout triggers autonomous fallback.
        """
        prof = self.get_profile(dataset_id)
        intent = parse_goal(goal, prof, provider=self.config.intent_provider)
        intent_validation = validate_intent(intent, prof)
        if not intent_validation.passed:
            raise PipeforgeError(
                f"intent validation failed: {'; '.join(intent_validation.errors)}")
        recs = self.recommender.recommend(intent, prof, k=k or self.config.top_k,
                                          user_id=user)
        selection = select(recs, mode=mode, choices=choices)
        pipeline = build(selection, intent, prof, self.catalog, goal=goal, owner=user,
                         param_provider=self.config.param_provider)
        pipeline.profile_ref = dataset_id

        awaiting_choices = mode == "interactive" and choices is None
        validation = None
        if awaiting_choices:
            with self._lock:
                self._awaiting[pipeline.id] = _Awaiting(
                    goal=goal, intent=intent, profile=prof, recommendations=recs,
                    deadline=time.monotonic() + self.config.selection_timeout)
        else:
            validation = validate_pipeline(pipeline, prof, catalog=self.catalog)
        with self._lock:
            self._pipelines[pipeline.id] = pipeline
        self.storage.put_pipeline(pipeline.to_dict())
        return pipeline, validation, recs

    def awaiting_selection(self, pipeline_id: str) -> bool:
        with self._lock:
            entry = self._awaiting.get(pipeline_id)
            return bool(entry and not entry.resolved)

    def submit_selections(self, pipeline_id: str, choices: dict) -> Pipeline:
        """Apply interactive choices to a pipeline awaiting selection."""
        with self._lock:
            entry = self._awaiting.get(pipeline_id)
            if entry is None or entry.resolved:
                raise InvalidChoice(f"pipeline {pipeline_id} is not awaiting selection")
            pipeline = self._pipelines[pipeline_id]
        unknown = [s for s in choices if s not in entry.intent.required_stages]
        if unknown:
            raise InvalidChoice(f"stages not awaiting selection: {unknown}")
        selection = select(entry.recommendations, mode="interactive", choices=choices)
        rebuilt = build(selection, entry.intent, entry.profile, self.catalog,
                        goal=entry.goal, owner=pipeline.owner,
                        param_provider=self.config.param_provider,
                        pipeline_id=pipeline.id)
        rebuilt.profile_ref = pipeline.profile_ref
        validate_pipeline(rebuilt, entry.profile, catalog=self.catalog)
        with self._lock:
            entry.resolved = True
            self._pipelines[pipeline_id] = rebuilt
        self.storage.put_pipeline(rebuilt.to_dict())
        return rebuilt

    def _finalize_fallback(self, pipeline_id: str) -> Pipeline:
        """Interactive window expired: keep the autonomous defaults."""
        with self._lock:
            entry = self._awaiting[pipeline_id]
            pipeline = self._pipelines[pipeline_id]
            entry.resolved = True
            entry.fell_back = True
        validate_pipeline(pipeline, entry.profile, catalog=self.catalog)
        self.storage.put_pipeline(pipeline.to_dict())
        return pipeline

    def get_pipeline(self, pipeline_id: str) -> Pipeline:
        with self._lock:
            if pipeline_id in self._pipelines:
                return self._pipelines[pipeline_id]
        stored = self.storage.get_pipeline(pipeline_id)
        if stored is None:
            raise KeyError(pipeline_id)
        pipeline = Pipeline.from_dict(stored)
        with self._lock:
            self._pipelines[pipeline_id] = pipeline
        return pipeline

    # -- execution --------------------------------------------------------------------------

    def _executor_config(self) -> ExecutorConfig:
        return ExecutorConfig(
            step_timeout=self.config.step_timeout,
            timeout_grace=self.config.timeout_grace,
            max_retries=self.config.max_retries,
            retry_base_delay=self.config.retry_base_delay,
            workspace_base=self.config.store_dir / "workspaces",
        )

    def _run(self, pipeline: Pipeline, user: str, selection_mode: str) -> RunRecord:
        dataset_name, content = self.get_dataset(pipeline.profile_ref)
        prof = self.get_profile(pipeline.profile_ref)
        sandbox = (self.config.sandbox_factory() if self.config.sandbox_factory
                   else SubprocessSandbox())
        record = execute(
            pipeline, content, sandbox, self.recommender, self.patterns,
            prof, config=self._executor_config(), user_id=user,
            healing_enabled=self.config.healing_enabled,
            status_callback=lambda p: self.storage.put_pipeline(p.to_dict()))
        record.selection_mode = selection_mode
        self.storage.add_run(record.to_dict())
        return record

    def execute_pipeline(self, pipeline_id: str, user: str = "default",
                         background: bool = True) -> dict:
        """Start execution; returns a job handle. One run per pipeline at a time."""
        pipeline = self.get_pipeline(pipeline_id)
        selection_mode = "autonomous"
        with self._lock:
            entry = self._awaiting.get(pipeline_id)
        if entry is not None:
            if entry.resolved:
                selection_mode = "autonomous_fallback" if entry.fell_back else "interactive"
            elif time.monotonic() >= entry.deadline:
                self._finalize_fallback(pipeline_id)
                selection_mode = "autonomous_fallback"
            else:
                raise IllegalStateTransition(
                    f"pipeline {pipeline_id} is awaiting interactive selection")
        if pipeline.status != "ready":
            raise IllegalStateTransition(
                f"pipeline {pipeline_id} is {pipeline.status}, not ready")
        with self._lock:
            if pipeline_id in self._executing:
                raise IllegalStateTransition(
                    f"pipeline {pipeline_id} is already executing")
            self._executing.add(pipeline_id)

        job = {"id": uuid.uuid4().hex[:12], "kind": "execution",
               "state": "queued", "pipeline_id": pipeline_id,
               "result_ref": None, "error_detail": None}
        self.storage.put_job(job)

        def work():
            job["state"] = "running"
            self.storage.put_job(job)
            try:
                record = self._run(pipeline, user, selection_mode)
                job["state"] = "done"
                job["result_ref"] = f"{pipeline_id}/runs/{len(self.storage.runs_for(pipeline_id)) - 1}"
            except Exception as exc:  # surfaced via the job, not a crashed worker
                job["state"] = "error"
                job["error_detail"] = f"{type(exc).__name__}: {exc}"
            finally:
                with self._lock:
                    self._executing.discard(pipeline_id)
                self.storage.put_job(job)

        if background:
            threading.Thread(target=work, daemon=True).start()
        else:
            work()
        return job

    def get_job(self, job_id: str) -> Optional[dict]:
        return self.storage.get_job(job_id)

    def runs_for(self, pipeline_id: str) -> List[dict]:
        return self.storage.runs_for(pipeline_id)

    # -- end to end ---------------------------------------------------------------------------

    def run_end_to_end(self, data: bytes, goal: str, mode: str = "autonomous",
                       user: str = "default", choices: Optional[dict] = None,
                       dataset_name: str = "dataset.csv",
                       k: Optional[int] = None) -> RunRecord:
        """The full composition, synchronously, with failures attributed to
        the agent that raised them (every engine error carries .agent)."""
        dataset_id, _prof = self.add_dataset(dataset_name, data)
        pipeline, validation, recs = self.create_pipeline(
            dataset_id, goal, mode=mode, user=user, k=k, choices=choices)
        selection_mode = mode

        if mode == "interactive" and choices is None:
            deadline = time.monotonic() + self.config.selection_timeout
            while time.monotonic() < deadline:
                with self._lock:
                    entry = self._awaiting[pipeline.id]
                    if entry.resolved:
                        break
                time.sleep(0.05)
            with self._lock:
                entry = self._awaiting[pipeline.id]
                resolved = entry.resolved
            if not resolved:
                self._finalize_fallback(pipeline.id)
                selection_mode = "autonomous_fallback"
            pipeline = self.get_pipeline(pipeline.id)

        if pipeline.status != "ready":
            raise PipeforgeError(
                f"pipeline {pipeline.id} failed validation; status {pipeline.status}")
        with self._lock:
            self._executing.add(pipeline.id)
        try:
            return self._run(pipeline, user, selection_mode)
        finally:
            with self._lock:
                self._executing.discard(pipeline.id)

    # -- patterns ----------------------------------------------------------------------------

    def patterns_summary(self) -> dict:
        snap = self.patterns.snapshot()
        return {
            "global": {key: {"successes": s, "failures": f}
                       for key, (s, f) in snap["global"].items()},
            "chains": snap["chains"],
            "trace_count": len(self.patterns.traces()),
        }
