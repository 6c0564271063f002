"""HTTP surface: payload parity with the CLI, job flow, error codes."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from sam_prior import __version__
from sam_prior.reports import run_analyze
from sam_prior.service import create_app

ANALYZE_CFG = {
    "endpoint": "binary",
    "method": {"kind": "sam"},
    "delta": 0.1,
    "historical": {"x": 120, "n": 300},
    "control": {"x": 58, "n": 150},
    "treatment": {"x": 75, "n": 150},
}

SCENARIO = {
    "endpoint": "binary",
    "theta": 0.4,
    "n": 150,
    "theta_t": 0.5,
    "n_t": 300,
    "delta": 0.1,
    "theta_h": 0.4,
    "n_h": 300,
    "label": "demo",
}


@pytest.fixture()
def client():
    with TestClient(create_app(threads=1)) as c:
        yield c


def _poll(client, job_id, timeout=60.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        record = client.get(f"/v1/jobs/{job_id}").json()
        if record["status"] in ("done", "failed"):
            return record
        time.sleep(0.05)
    raise TimeoutError(f"job {job_id} did not finish")


def test_health(client):
    body = client.get("/v1/health").json()
    assert body["status"] == "ok"
    assert body["software_version"] == __version__


def test_analyze_matches_library_call(client):
    resp = client.post("/v1/analyze", json=ANALYZE_CFG)
    assert resp.status_code == 200
    assert resp.json() == json.loads(json.dumps(run_analyze(ANALYZE_CFG)))


def test_malformed_body_is_schema_error(client):
    resp = client.post(
        "/v1/analyze", content=b"{oops", headers={"content-type": "application/json"}
    )
    assert resp.status_code == 400
    body = resp.json()
    assert set(body) == {"code", "message", "field_path"}
    assert body["code"] == "malformed_json"


def test_schema_violation_reports_field_path(client):
    cfg = {**ANALYZE_CFG, "control": {"x": 58}}
    resp = client.post("/v1/analyze", json=cfg)
    assert resp.status_code == 400
    body = resp.json()
    assert body["code"] == "schema_violation"
    assert "control" in body["field_path"]


def test_unsupported_method_is_422(client):
    cfg = {**ANALYZE_CFG, "method": {"kind": "cp"}}
    del cfg["delta"]
    resp = client.post("/v1/analyze", json=cfg)
    assert resp.status_code == 422
    body = resp.json()
    assert body["code"] == "unsupported_method"
    assert "commensurate" in body["message"]


def test_unknown_job_is_404(client):
    assert client.get("/v1/jobs/missing").status_code == 404
    resp = client.get("/v1/jobs/missing/result")
    assert resp.status_code == 404
    assert resp.json()["code"] == "unknown_job"


def test_simulate_job_lifecycle(client):
    cfg = {
        "scenarios": [SCENARIO],
        "methods": [{"kind": "np"}, {"kind": "sam"}],
        "replicates": 100,
        "calibration_replicates": 1000,
        "seed": 5,
    }
    resp = client.post("/v1/simulate", json=cfg)
    assert resp.status_code == 202
    record = resp.json()
    assert record["kind"] == "simulate"
    assert record["status"] in ("queued", "running")
    assert record["seed"] == 5 and record["replicates"] == 100
    assert record["software_version"] == __version__

    final = _poll(client, record["id"])
    assert final["status"] == "done" and final["progress"] == 1.0

    payload = client.get(f"/v1/jobs/{record['id']}/result").json()
    assert [r["method"] for r in payload["rows"]] == ["np", "sam"]
    assert payload["seed"] == 5 and payload["replicates"] == 100


def test_result_before_completion_is_409(client):
    cfg = {
        "scenarios": [SCENARIO],
        "methods": [{"kind": "np"}],
        "replicates": 2000,
        "calibration_replicates": 5000,
        "seed": 1,
    }
    record = client.post("/v1/simulate", json=cfg).json()
    resp = client.get(f"/v1/jobs/{record['id']}/result")
    if resp.status_code == 409:  # job may finish fast on an idle box
        assert resp.json()["code"] == "result_not_ready"
    _poll(client, record["id"])


def test_failed_job_surfaces_409_with_cause(client):
    # Passes the schema, then explodes in the worker: the power prior
    # needs raw historical counts, not a prior-only mixture.
    scenario = {
        "endpoint": "binary",
        "theta": 0.4,
        "n": 150,
        "theta_t": 0.5,
        "n_t": 300,
        "delta": 0.1,
        "informative": {
            "family": "beta",
            "components": [{"w": 1.0, "a": 121, "b": 181}],
        },
    }
    cfg = {
        "scenarios": [scenario],
        "methods": [{"kind": "pp"}],
        "replicates": 50,
        "calibration_replicates": 1000,
    }
    record = client.post("/v1/simulate", json=cfg).json()
    final = _poll(client, record["id"])
    assert final["status"] == "failed"
    assert "historical" in final["error"]
    resp = client.get(f"/v1/jobs/{record['id']}/result")
    assert resp.status_code == 409
    assert resp.json()["code"] == "job_failed"


def test_calibrate_endpoint_returns_job(client):
    cfg = {
        "scenario": SCENARIO,
        "methods": [{"kind": "np"}],
        "replicates": 1000,
        "seed": 2,
    }
    record = client.post("/v1/calibrate", json=cfg).json()
    final = _poll(client, record["id"])
    assert final["status"] == "done"
    payload = client.get(f"/v1/jobs/{record['id']}/result").json()
    assert payload["null_label"] == "null@0.4"
    assert len(payload["cutoffs"]) == 1


def test_small_weight_curve_is_synchronous(client):
    cfg = {
        "scenario": SCENARIO,
        "theta_grid": [0.3, 0.4, 0.5],
        "replicates": 200,
        "seed": 3,
    }
    resp = client.post("/v1/weight-curve", json=cfg)
    assert resp.status_code == 200
    body = resp.json()
    assert body["theta"] == [0.3, 0.4, 0.5]
    assert body["mean_w"][1] == max(body["mean_w"])


def test_large_weight_curve_becomes_job(client):
    cfg = {
        "scenario": SCENARIO,
        "theta_grid": [0.3, 0.4, 0.5],
        "replicates": 2001,
        "seed": 3,
    }
    resp = client.post("/v1/weight-curve", json=cfg)
    assert resp.status_code == 202
    record = resp.json()
    assert record["kind"] == "curve"
    final = _poll(client, record["id"])
    assert final["status"] == "done"


def test_http_and_cli_payloads_are_identical(client, tmp_path):
    from sam_prior.cli import main

    cfg = {
        "scenarios": [SCENARIO],
        "methods": [{"kind": "np"}, {"kind": "mix", "w_tilde": 0.5}],
        "replicates": 150,
        "calibration_replicates": 1000,
        "seed": 11,
    }
    record = client.post("/v1/simulate", json=cfg).json()
    _poll(client, record["id"])
    via_http = client.get(f"/v1/jobs/{record['id']}/result").json()

    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "oc.csv"
    assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
    via_cli = json.loads((tmp_path / "oc.json").read_text())
    assert via_http == via_cli
