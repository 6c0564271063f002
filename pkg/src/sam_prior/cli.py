"""Command-line entry points.

Every subcommand reads a strict-JSON config, applies flag overrides on
top, and writes its outputs to ``--out`` (CSV plus a JSON mirror for
tabular results, plain JSON otherwise). Validation problems exit with
code 2 and a message naming the offending field.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .comparators import UnsupportedMethodError
from .reports import (
    curve_to_csv_text,
    rows_to_csv_text,
    run_analyze,
    run_calibrate,
    run_curve,
    run_simulate,
)
from .schemas import (
    ANALYZE_SCHEMA,
    CALIBRATE_SCHEMA,
    CURVE_SCHEMA,
    SIMULATE_SCHEMA,
    ConfigError,
    validate_config,
)

log = logging.getLogger("sam_prior")

_SCHEMAS = {
    "analyze": ANALYZE_SCHEMA,
    "calibrate": CALIBRATE_SCHEMA,
    "simulate": SIMULATE_SCHEMA,
    "curve": CURVE_SCHEMA,
}


def _configure_logging() -> None:
    level_name = os.environ.get("SAM_PRIOR_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError("unreadable_config", f"cannot read config: {exc}", "") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            "malformed_json",
            f"config is not valid JSON: {exc}",
            f"line {exc.lineno}, column {exc.colno}",
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError("malformed_json", "config root must be a JSON object", "")
    return cfg


def _apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    """Flags beat file values so a config can be re-run at other settings."""
    merged = dict(cfg)
    for key in ("seed", "replicates", "threads"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


class _StderrProgress:
    """Progress reporter that prints at most one line per 5% step."""

    def __init__(self, label: str) -> None:
        self._label = label
        self._last = -1

    def __call__(self, fraction: float) -> None:
        step = int(fraction * 20)
        if step > self._last:
            self._last = step
            print(f"{self._label}: {fraction:4.0%}", file=sys.stderr, flush=True)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out:
        _write_text(Path(out), text)
    else:
        sys.stdout.write(text)


def _emit_tabular(csv_text: str, payload: dict, out: str | None) -> None:
    if out:
        out_path = Path(out)
        _write_text(out_path, csv_text)
        mirror = out_path.with_suffix(".json")
        _write_text(mirror, json.dumps(payload, indent=2) + "\n")
        log.info("wrote %s and %s", out_path, mirror)
    else:
        sys.stdout.write(csv_text)


def _cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    validate_config(cfg, _SCHEMAS["analyze"])
    report = run_analyze(cfg)
    _emit_json(report, args.out)
    if args.out:
        sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def _cmd_calibrate(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    validate_config(cfg, _SCHEMAS["calibrate"])
    payload = run_calibrate(cfg, progress=_StderrProgress("calibrate"))
    _emit_json(payload, args.out)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    validate_config(cfg, _SCHEMAS["simulate"])
    payload = run_simulate(cfg, progress=_StderrProgress("simulate"))
    _emit_tabular(rows_to_csv_text(payload["rows"]), payload, args.out)
    return 0


def _cmd_curve(args: argparse.Namespace) -> int:
    cfg = _apply_overrides(_load_config(args.config), args)
    validate_config(cfg, _SCHEMAS["curve"])
    payload = run_curve(cfg, progress=_StderrProgress("curve"))
    _emit_tabular(curve_to_csv_text(payload), payload, args.out)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        threads=args.threads or 1,
        persist_dir=args.persist_dir,
        cors_origins=args.cors_origin,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sam-prior",
        description="Adaptive historical-borrowing priors: analysis, "
        "calibration, and operating-characteristic simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, *, config_required: bool = True) -> None:
        p.add_argument("--config", required=config_required, help="path to a JSON config")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--replicates", type=int, help="override the replicate count")
        p.add_argument("--threads", type=int, help="worker processes (default 1)")
        p.add_argument("--out", help="output path (CSV gets a .json mirror)")

    p_analyze = sub.add_parser("analyze", help="posterior report for one observed dataset")
    add_common(p_analyze)
    p_analyze.set_defaults(func=_cmd_analyze)

    p_calibrate = sub.add_parser("calibrate", help="simulation-calibrated decision cutoffs")
    add_common(p_calibrate)
    p_calibrate.set_defaults(func=_cmd_calibrate)

    p_simulate = sub.add_parser("simulate", help="operating characteristics for a scenario batch")
    add_common(p_simulate)
    p_simulate.set_defaults(func=_cmd_simulate)

    p_curve = sub.add_parser("curve", help="mean adaptive weight across true control values")
    add_common(p_curve)
    p_curve.set_defaults(func=_cmd_curve)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--threads", type=int, help="simulation worker processes per job")
    p_serve.add_argument("--persist-dir", help="directory for job result files")
    p_serve.add_argument(
        "--cors-origin",
        action="append",
        help="allowed CORS origin (repeatable)",
    )
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        where = f" (at {exc.field_path})" if exc.field_path else ""
        print(f"error: {exc.message}{where}", file=sys.stderr)
        return 2
    except UnsupportedMethodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
