"""In-memory job store for long-running simulation work.

Jobs run on a small thread pool; the underlying engine releases the
interpreter lock inside its worker processes, so the pool only needs to
keep the HTTP loop responsive. Records move queued -> running ->
done | failed, progress never decreases and reaches exactly 1.0 on
success. Results live in memory and, when a persist directory is
configured, one JSON file per job id is written as well.
"""
from __future__ import annotations

import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

__all__ = ["JobRecord", "JobStore", "UnknownJobError", "ResultNotReadyError"]


class UnknownJobError(KeyError):
    pass


class ResultNotReadyError(RuntimeError):
    def __init__(self, status: str, message: str) -> None:
        super().__init__(message)
        self.status = status


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass
class JobRecord:
    id: str
    kind: str
    status: str = "queued"
    progress: float = 0.0
    result_ref: str | None = None
    submitted_at: str = field(default_factory=_now)
    finished_at: str | None = None
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "progress": self.progress,
            "result_ref": self.result_ref,
            "submitted_at": self.submitted_at,
            "finished_at": self.finished_at,
            "error": self.error,
        }


class JobStore:
    """Synchronized registry of jobs plus the pool that runs them."""

    def __init__(self, workers: int = 2, persist_dir: str | Path | None = None) -> None:
        self._lock = threading.Lock()
        self._records: dict[str, JobRecord] = {}
        self._results: dict[str, Any] = {}
        self._pool = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="job")
        self._persist_dir = Path(persist_dir) if persist_dir is not None else None
        if self._persist_dir is not None:
            self._persist_dir.mkdir(parents=True, exist_ok=True)

    def submit(self, kind: str, work: Callable[[Callable[[float], None]], Any]) -> JobRecord:
        """Queue a job; work receives a progress callback taking [0, 1]."""
        job_id = uuid.uuid4().hex
        record = JobRecord(id=job_id, kind=kind)
        with self._lock:
            self._records[job_id] = record
        self._pool.submit(self._run, job_id, work)
        with self._lock:
            return JobRecord(**vars(self._records[job_id]))

    def _set_progress(self, job_id: str, fraction: float) -> None:
        with self._lock:
            rec = self._records[job_id]
            rec.progress = min(1.0, max(rec.progress, float(fraction)))

    def _run(self, job_id: str, work: Callable[[Callable[[float], None]], Any]) -> None:
        with self._lock:
            self._records[job_id].status = "running"
        try:
            result = work(lambda f: self._set_progress(job_id, f))
        except Exception as exc:  # surfaced through the record, not the pool
            with self._lock:
                rec = self._records[job_id]
                rec.status = "failed"
                rec.error = str(exc)
                rec.finished_at = _now()
            return
        ref = self._persist(job_id, result)
        with self._lock:
            rec = self._records[job_id]
            self._results[job_id] = result
            rec.status = "done"
            rec.progress = 1.0
            rec.result_ref = ref
            rec.finished_at = _now()

    def _persist(self, job_id: str, result: Any) -> str:
        if self._persist_dir is None:
            return f"memory:{job_id}"
        path = self._persist_dir / f"{job_id}.json"
        path.write_text(json.dumps(result), encoding="utf-8")
        return str(path)

    def get(self, job_id: str) -> JobRecord:
        with self._lock:
            rec = self._records.get(job_id)
            if rec is None:
                raise UnknownJobError(job_id)
            return JobRecord(**vars(rec))

    def result(self, job_id: str) -> Any:
        with self._lock:
            rec = self._records.get(job_id)
            if rec is None:
                raise UnknownJobError(job_id)
            if rec.status == "failed":
                raise ResultNotReadyError("failed", rec.error or "job failed")
            if rec.status != "done":
                raise ResultNotReadyError(rec.status, f"job is {rec.status}")
            return self._results[job_id]

    def shutdown(self) -> None:
        self._pool.shutdown(wait=False, cancel_futures=True)
