"""Job store: lifecycle transitions, progress, and persistence."""

import json
import threading
import time

import pytest

from sam_prior.jobs import JobStore, ResultNotReadyError, UnknownJobError


def _wait(store, job_id, timeout=5.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        record = store.get(job_id)
        if record.status in ("done", "failed"):
            return record
        time.sleep(0.01)
    raise TimeoutError(f"job {job_id} still {record.status}")


def test_job_completes_with_full_progress():
    store = JobStore(workers=1)
    gate = threading.Event()
    try:
        def work(progress):
            gate.wait(5)
            progress(0.4)
            progress(0.2)  # regressions must not move the needle back
            return {"answer": 42}

        record = store.submit("simulate", work)
        early = store.get(record.id)
        assert early.status in ("queued", "running") and early.progress == 0.0
        gate.set()
        final = _wait(store, record.id)
        assert final.status == "done"
        assert final.progress == 1.0
        assert final.finished_at is not None
        assert store.result(record.id) == {"answer": 42}
        assert final.result_ref == f"memory:{record.id}"
    finally:
        store.shutdown()


def test_progress_is_monotone():
    store = JobStore(workers=1)
    try:
        seen = []

        def work(progress):
            for f in (0.1, 0.5, 0.3, 0.8):
                progress(f)
                seen.append(store.get(job.id).progress)

        job = store.submit("curve", work)
        _wait(store, job.id)
        assert seen == sorted(seen)
    finally:
        store.shutdown()


def test_failed_job_reports_error_and_blocks_result():
    store = JobStore(workers=1)
    try:
        def work(progress):
            raise RuntimeError("scenario exploded")

        record = store.submit("simulate", work)
        final = _wait(store, record.id)
        assert final.status == "failed"
        assert "scenario exploded" in final.error
        with pytest.raises(ResultNotReadyError) as err:
            store.result(record.id)
        assert err.value.status == "failed"
    finally:
        store.shutdown()


def test_unknown_job_raises():
    store = JobStore(workers=1)
    try:
        with pytest.raises(UnknownJobError):
            store.get("nope")
        with pytest.raises(UnknownJobError):
            store.result("nope")
    finally:
        store.shutdown()


def test_results_can_persist_to_disk(tmp_path):
    store = JobStore(workers=1, persist_dir=tmp_path)
    try:
        record = store.submit("calibrate", lambda progress: {"cutoff": 0.95})
        final = _wait(store, record.id)
        assert final.result_ref == str(tmp_path / f"{record.id}.json")
        on_disk = json.loads((tmp_path / f"{record.id}.json").read_text())
        assert on_disk == {"cutoff": 0.95}
    finally:
        store.shutdown()
