"""HTTP front end.

Thin JSON-over-HTTP layer over the report functions. Request bodies are
plain JSON validated by the same schemas the CLI uses, so both surfaces
accept identical configs and return identical payloads. Long runs go
through an in-process job store and are polled by id.
"""

from __future__ import annotations

import json
from contextlib import asynccontextmanager
from typing import Iterable

from fastapi import FastAPI, Request
from fastapi.concurrency import run_in_threadpool
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .comparators import UnsupportedMethodError
from .jobs import JobStore, ResultNotReadyError, UnknownJobError
from .reports import run_analyze, run_calibrate, run_curve, run_simulate
from .schemas import (
    ANALYZE_SCHEMA,
    CALIBRATE_SCHEMA,
    CURVE_SCHEMA,
    SIMULATE_SCHEMA,
    ConfigError,
    resolve_theta_grid,
    validate_config,
)

SYNC_CURVE_MAX_GRID = 201
SYNC_CURVE_MAX_REPLICATES = 2000


def _error_body(code: str, message: str, field_path: str = "") -> dict:
    return {"code": code, "message": message, "field_path": field_path}


async def _read_config(request: Request, schema: dict) -> dict:
    try:
        body = json.loads(await request.body())
    except json.JSONDecodeError as exc:
        raise ConfigError("malformed_json", f"body is not valid JSON: {exc}", "") from exc
    if not isinstance(body, dict):
        raise ConfigError("malformed_json", "body must be a JSON object", "")
    validate_config(body, schema)
    return body


def create_app(
    threads: int = 1,
    persist_dir: str | None = None,
    cors_origins: Iterable[str] | None = None,
) -> FastAPI:
    """Build the application; one job store per instance."""
    store = JobStore(workers=2, persist_dir=persist_dir)
    job_settings: dict[str, dict] = {}

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        store.shutdown()

    app = FastAPI(title="sam-prior", version=__version__, lifespan=lifespan)

    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins) if cors_origins else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _record_payload(job_id: str) -> dict:
        record = store.get(job_id).to_dict()
        record.update(job_settings.get(job_id, {}))
        record["software_version"] = __version__
        return record

    def _submit(kind: str, cfg: dict, runner, seed_default: int, reps_default: int) -> JSONResponse:
        record = store.submit(kind, lambda progress: runner(cfg, progress=progress))
        job_settings[record.id] = {
            "seed": cfg.get("seed", seed_default),
            "replicates": cfg.get("replicates", reps_default),
        }
        return JSONResponse(status_code=202, content=_record_payload(record.id))

    @app.exception_handler(ConfigError)
    async def _on_config_error(request: Request, exc: ConfigError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content=_error_body(exc.code, exc.message, exc.field_path)
        )

    @app.exception_handler(UnsupportedMethodError)
    async def _on_unsupported(request: Request, exc: UnsupportedMethodError) -> JSONResponse:
        return JSONResponse(status_code=422, content=_error_body("unsupported_method", str(exc)))

    @app.exception_handler(ValueError)
    async def _on_value_error(request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content=_error_body("invalid_config", str(exc)))

    @app.exception_handler(UnknownJobError)
    async def _on_unknown_job(request: Request, exc: UnknownJobError) -> JSONResponse:
        return JSONResponse(
            status_code=404,
            content=_error_body("unknown_job", f"no job with id {exc.args[0]}", "id"),
        )

    @app.exception_handler(ResultNotReadyError)
    async def _on_not_ready(request: Request, exc: ResultNotReadyError) -> JSONResponse:
        code = "job_failed" if exc.status == "failed" else "result_not_ready"
        return JSONResponse(status_code=409, content=_error_body(code, str(exc)))

    @app.get("/v1/health")
    async def health() -> dict:
        return {
            "status": "ok",
            "seed": None,
            "replicates": None,
            "software_version": __version__,
        }

    @app.post("/v1/analyze")
    async def analyze(request: Request) -> dict:
        cfg = await _read_config(request, ANALYZE_SCHEMA)
        return await run_in_threadpool(run_analyze, cfg)

    @app.post("/v1/weight-curve")
    async def weight_curve_endpoint(request: Request):
        cfg = await _read_config(request, CURVE_SCHEMA)
        grid = resolve_theta_grid(cfg["theta_grid"])
        replicates = cfg.get("replicates", 2000)
        if len(grid) <= SYNC_CURVE_MAX_GRID and replicates <= SYNC_CURVE_MAX_REPLICATES:
            return await run_in_threadpool(run_curve, cfg)
        return _submit("curve", cfg, run_curve, seed_default=0, reps_default=2000)

    @app.post("/v1/calibrate")
    async def calibrate(request: Request) -> JSONResponse:
        cfg = await _read_config(request, CALIBRATE_SCHEMA)
        cfg.setdefault("threads", threads)
        return _submit("calibrate", cfg, run_calibrate, seed_default=0, reps_default=10_000)

    @app.post("/v1/simulate")
    async def simulate(request: Request) -> JSONResponse:
        cfg = await _read_config(request, SIMULATE_SCHEMA)
        cfg.setdefault("threads", threads)
        return _submit("simulate", cfg, run_simulate, seed_default=0, reps_default=2000)

    @app.get("/v1/jobs/{job_id}")
    async def job_status(job_id: str) -> dict:
        return _record_payload(job_id)

    @app.get("/v1/jobs/{job_id}/result")
    async def job_result(job_id: str) -> dict:
        return store.result(job_id)

    return app
