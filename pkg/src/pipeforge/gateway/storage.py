"""Single-file relational persistence (sqlite) for gateway state.

Everything visible over HTTP derives from these tables, so a restart loses
no terminal results. Rows hold JSON blobs; the schema stays deliberately
simple — this is an embedded store, not a warehouse.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from pathlib import Path
from typing import List, Optional

_SCHEMA = """
CREATE TABLE IF NOT EXISTS microservices (id TEXT PRIMARY KEY, data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS datasets (id TEXT PRIMARY KEY, name TEXT NOT NULL, content BLOB NOT NULL);
CREATE TABLE IF NOT EXISTS profiles (dataset_id TEXT PRIMARY KEY, data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS pipelines (id TEXT PRIMARY KEY, status TEXT NOT NULL, data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS runs (id INTEGER PRIMARY KEY AUTOINCREMENT, pipeline_id TEXT NOT NULL, data TEXT NOT NULL);
CREATE TABLE IF NOT EXISTS jobs (id TEXT PRIMARY KEY, data TEXT NOT NULL);
"""


class Storage:
    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        with self._lock:
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- generic helpers -------------------------------------------------------

    def _put(self, table: str, key_col: str, key: str, data: dict, **extra) -> None:
        cols = [key_col, "data", *extra.keys()]
        placeholders = ", ".join("?" for _ in cols)
        values = [key, json.dumps(data, sort_keys=True), *extra.values()]
        with self._lock:
            self._conn.execute(
                f"INSERT OR REPLACE INTO {table} ({', '.join(cols)}) VALUES ({placeholders})",
                values)
            self._conn.commit()

    def _get(self, table: str, key_col: str, key: str) -> Optional[dict]:
        with self._lock:
            row = self._conn.execute(
                f"SELECT data FROM {table} WHERE {key_col} = ?", (key,)).fetchone()
        return json.loads(row[0]) if row else None

    # -- microservices -----------------------------------------------------------

    def put_microservice(self, ms_dict: dict) -> None:
        self._put("microservices", "id", ms_dict["id"], ms_dict)

    def get_microservice(self, ms_id: str) -> Optional[dict]:
        return self._get("microservices", "id", ms_id)

    def list_microservices(self) -> List[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT data FROM microservices ORDER BY id").fetchall()
        return [json.loads(r[0]) for r in rows]

    # -- datasets + profiles -------------------------------------------------------

    def put_dataset(self, dataset_id: str, name: str, content: bytes) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO datasets (id, name, content) VALUES (?, ?, ?)",
                (dataset_id, name, content))
            self._conn.commit()

    def get_dataset(self, dataset_id: str) -> Optional[tuple]:
        with self._lock:
            row = self._conn.execute(
                "SELECT name, content FROM datasets WHERE id = ?", (dataset_id,)).fetchone()
        return (row[0], row[1]) if row else None

    def put_profile(self, dataset_id: str, profile_dict: dict) -> None:
        self._put("profiles", "dataset_id", dataset_id, profile_dict)

    def get_profile(self, dataset_id: str) -> Optional[dict]:
        return self._get("profiles", "dataset_id", dataset_id)

    # -- pipelines --------------------------------------------------------------------

    def put_pipeline(self, pipeline_dict: dict) -> None:
        self._put("pipelines", "id", pipeline_dict["id"], pipeline_dict,
                  status=pipeline_dict["status"])

    def get_pipeline(self, pipeline_id: str) -> Optional[dict]:
        return self._get("pipelines", "id", pipeline_id)

    def list_pipelines(self) -> List[dict]:
        with self._lock:
            rows = self._conn.execute("SELECT data FROM pipelines ORDER BY id").fetchall()
        return [json.loads(r[0]) for r in rows]

    # -- runs ---------------------------------------------------------------------------

    def add_run(self, run_dict: dict) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO runs (pipeline_id, data) VALUES (?, ?)",
                (run_dict["pipeline_id"], json.dumps(run_dict, sort_keys=True)))
            self._conn.commit()

    def runs_for(self, pipeline_id: str) -> List[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT data FROM runs WHERE pipeline_id = ? ORDER BY id",
                (pipeline_id,)).fetchall()
        return [json.loads(r[0]) for r in rows]

    # -- jobs ------------------------------------------------------------------------------

    def put_job(self, job_dict: dict) -> None:
        self._put("jobs", "id", job_dict["id"], job_dict)

    def get_job(self, job_id: str) -> Optional[dict]:
        return self._get("jobs", "id", job_id)
