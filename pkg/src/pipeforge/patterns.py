"""Execution-history store: reinforcement counts, demotion, chain edges.

Every step execution appends an immutable trace. Success increments the
success count for both the global (microservice, stage) key and the
user-scoped one; failures increment the failure count. The effective count —
max(0, successes - demotion_factor * failures) — is what feeds the pattern
signal in recommendation scoring, so failure-prone components visibly sink.
Consecutive successful steps inside one pipeline run also form chain edges
("what comes next"), counted per user.

The trace log is append-only newline-delimited JSON; replaying a log from an
empty store reproduces identical statistics.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

DEFAULT_DEMOTION_FACTOR = 0.5
DEFAULT_USER_BLEND = 0.7  # weight on the user's own history when present


@dataclass(frozen=True)
class ExecutionTrace:
    user_id: str
    pipeline_id: str
    stage: str
    microservice_id: str
    outcome: str  # success | failure
    timestamp: str
    position: int

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "pipeline_id": self.pipeline_id,
            "stage": self.stage,
            "microservice_id": self.microservice_id,
            "outcome": self.outcome,
            "timestamp": self.timestamp,
            "position": self.position,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExecutionTrace":
        return cls(**d)


@dataclass
class PatternStats:
    success_count: int = 0
    failure_count: int = 0

    def effective(self, demotion_factor: float) -> float:
        return max(0.0, self.success_count - demotion_factor * self.failure_count)


class PatternStore:
    """Thread-safe counters plus an optional on-disk NDJSON trace log."""

    def __init__(self, demotion_factor: float = DEFAULT_DEMOTION_FACTOR,
                 user_blend: float = DEFAULT_USER_BLEND,
                 log_path: Optional[Path] = None):
        self.demotion_factor = demotion_factor
        self.user_blend = user_blend
        self.log_path = Path(log_path) if log_path else None
        self._lock = threading.RLock()
        self._global: Dict[Tuple[str, str], PatternStats] = {}
        self._user: Dict[Tuple[str, str, str], PatternStats] = {}
        self._chains: Dict[Tuple[str, str, str], int] = {}  # (from, to, user) -> count
        self._last_success: Dict[str, Tuple[int, str]] = {}  # pipeline -> (position, ms_id)
        self._traces: List[ExecutionTrace] = []

    # -- recording -------------------------------------------------------------

    def record(self, trace: ExecutionTrace) -> None:
        if trace.outcome not in ("success", "failure"):
            raise ValueError(f"invalid outcome: {trace.outcome}")
        with self._lock:
            self._traces.append(trace)
            g = self._global.setdefault((trace.microservice_id, trace.stage), PatternStats())
            u = self._user.setdefault(
                (trace.user_id, trace.microservice_id, trace.stage), PatternStats())
            if trace.outcome == "success":
                g.success_count += 1
                u.success_count += 1
                prev = self._last_success.get(trace.pipeline_id)
                if prev is not None and prev[0] == trace.position - 1:
                    key = (prev[1], trace.microservice_id, trace.user_id)
                    self._chains[key] = self._chains.get(key, 0) + 1
                self._last_success[trace.pipeline_id] = (trace.position, trace.microservice_id)
            else:
                g.failure_count += 1
                u.failure_count += 1
            if self.log_path is not None:
                with open(self.log_path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(trace.to_dict(), sort_keys=True) + "\n")

    # -- queries ---------------------------------------------------------------

    def global_stats(self, microservice_id: str, stage: str) -> PatternStats:
        with self._lock:
            return self._global.get((microservice_id, stage), PatternStats())

    def user_stats(self, user_id: str, microservice_id: str, stage: str) -> PatternStats:
        with self._lock:
            return self._user.get((user_id, microservice_id, stage), PatternStats())

    def effective(self, microservice_id: str, stage: str,
                  user_id: Optional[str] = None) -> float:
        """Blend of user and global effective counts; global-only without a user."""
        with self._lock:
            g = self._global.get((microservice_id, stage), PatternStats())
            g_eff = g.effective(self.demotion_factor)
            if user_id is None:
                return g_eff
            u = self._user.get((user_id, microservice_id, stage), PatternStats())
            u_eff = u.effective(self.demotion_factor)
            return self.user_blend * u_eff + (1 - self.user_blend) * g_eff

    def top_chains(self, from_id: str, k: int) -> List[Tuple[str, int]]:
        """Most frequent successors of from_id, count-descending then by id."""
        with self._lock:
            totals: Dict[str, int] = {}
            for (src, dst, _user), count in self._chains.items():
                if src == from_id:
                    totals[dst] = totals.get(dst, 0) + count
        ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:k]

    def traces(self) -> List[ExecutionTrace]:
        with self._lock:
            return list(self._traces)

    def snapshot(self) -> dict:
        """Materialized counters, rebuildable from the trace log."""
        with self._lock:
            return {
                "global": {
                    f"{ms}::{stage}": (s.success_count, s.failure_count)
                    for (ms, stage), s in sorted(self._global.items())
                },
                "user": {
                    f"{user}::{ms}::{stage}": (s.success_count, s.failure_count)
                    for (user, ms, stage), s in sorted(self._user.items())
                },
                "chains": {
                    f"{src}->{dst}::{user}": count
                    for (src, dst, user), count in sorted(self._chains.items())
                },
            }

    # -- replay ------------------------------------------------------------------

    @classmethod
    def replay(cls, traces, demotion_factor: float = DEFAULT_DEMOTION_FACTOR,
               user_blend: float = DEFAULT_USER_BLEND) -> "PatternStore":
        store = cls(demotion_factor=demotion_factor, user_blend=user_blend)
        for trace in traces:
            store.record(trace)
        return store

    @classmethod
    def replay_log(cls, log_path, **kwargs) -> "PatternStore":
        traces = []
        with open(log_path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    traces.append(ExecutionTrace.from_dict(json.loads(line)))
        return cls.replay(traces, **kwargs)


class DisabledPatternStore(PatternStore):
    """History-learning ablation: accepts record() calls but learns nothing,
    so the pattern signal is exactly zero everywhere."""

    def record(self, trace: ExecutionTrace) -> None:
        if trace.outcome not in ("success", "failure"):
            raise ValueError(f"invalid outcome: {trace.outcome}")
