"""Bridge from validated configs to result payloads and files.

Every front end (CLI command or HTTP endpoint) validates its config
against the schemas, then calls one of the run_* functions here, so a
given config and seed produce the same numbers no matter which door
they came through. Payloads are plain dicts ready for json.dump; CSV
text is rendered with a fixed column order and shortest round-trip
float formatting, which is what makes output files byte-comparable
across runs and worker counts.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import replace
from typing import Any, Callable

from . import __version__
from .comparators import (
    MethodSpec,
    fixed_mixture_posterior,
    np_posterior,
    power_prior_posterior,
)
from .decision import evaluate_decision
from .mixtures import (
    BinarySummary,
    MixtureDistribution,
    NormalSummary,
    beta_mixture,
    mixture_mean,
    mixture_to_dict,
    mixture_update,
    normal_mixture,
)
from .sam import sam_posterior, sam_weight_to_dict
from .schemas import (
    ConfigError,
    parse_method,
    parse_methods,
    parse_scenario,
    parse_summary,
    resolve_theta_grid,
)
from .simulate import (
    OCMetrics,
    calibrate_cutoff,
    null_scenario,
    simulate_batch,
    weight_curve,
)

__all__ = [
    "CSV_COLUMNS",
    "run_analyze",
    "run_simulate",
    "run_calibrate",
    "run_curve",
    "metrics_row",
    "rows_to_csv_text",
    "curve_to_csv_text",
]

CSV_COLUMNS = [
    "scenario_label",
    "method",
    "cutoff",
    "rejection_rate",
    "bias",
    "mse",
    "relative_bias",
    "relative_mse",
    "mean_weight",
    "replicates",
    "seed",
]


def _pooled_sigma(
    control: NormalSummary, historical: NormalSummary | None, sigma_mode: str
) -> float:
    if control.sd is None:
        raise ConfigError(
            "invalid_config", "control arm needs sd for a normal endpoint", "control.sd"
        )
    if sigma_mode == "current" or historical is None or historical.sd is None or historical.n < 2:
        return control.sd
    pooled = ((control.n - 1) * control.sd**2 + (historical.n - 1) * historical.sd**2) / (
        control.n + historical.n - 2
    )
    return math.sqrt(pooled)


def _analysis_priors(
    endpoint: str,
    cfg: dict,
    historical: BinarySummary | NormalSummary | None,
    control: BinarySummary | NormalSummary,
) -> tuple[MixtureDistribution | None, MixtureDistribution]:
    """Resolve (informative, vague), deriving defaults where omitted."""
    from .mixtures import mixture_from_dict

    informative = (
        mixture_from_dict(cfg["informative"]) if cfg.get("informative") is not None else None
    )
    vague = mixture_from_dict(cfg["vague"]) if cfg.get("vague") is not None else None

    if endpoint == "binary":
        if vague is None:
            vague = beta_mixture([(1.0, 1.0, 1.0)])
        if informative is None and historical is not None:
            informative = mixture_update(vague, historical)
        return informative, vague

    assert isinstance(control, NormalSummary)
    if informative is None and historical is not None:
        assert isinstance(historical, NormalSummary)
        if historical.sd is None or historical.n < 1:
            raise ConfigError(
                "invalid_config",
                "historical arm needs n >= 1 and sd to derive an informative prior",
                "historical",
            )
        informative = normal_mixture(
            [(1.0, historical.mean, historical.sd**2 / historical.n)]
        )
    if vague is None:
        if informative is not None:
            center = mixture_mean(informative)
        elif historical is not None:
            center = historical.mean
        else:
            center = control.mean
        if historical is not None and isinstance(historical, NormalSummary) and historical.sd:
            scale = historical.sd
        else:
            scale = control.sd if control.sd is not None else 1.0
        vague = normal_mixture([(1.0, center, scale**2)])
    return informative, vague


def run_analyze(cfg: dict) -> dict:
    """Posterior analysis of one observed two-arm dataset.

    The treatment arm is always analyzed with the vague prior; the
    control arm with the requested method. The report carries both
    posteriors in serialized form, the adaptive weight record when the
    method has one, and the decision at the supplied cutoff.
    """
    endpoint = cfg["endpoint"]
    method = parse_method(cfg["method"])
    control = parse_summary(endpoint, cfg["control"], "control")
    treatment = parse_summary(endpoint, cfg["treatment"], "treatment")
    historical = (
        parse_summary(endpoint, cfg["historical"], "historical")
        if cfg.get("historical") is not None
        else None
    )
    cutoff = cfg.get("cutoff", 0.95)
    delta = cfg.get("delta")

    if method.kind == "sam" and delta is None:
        raise ConfigError("invalid_config", "the adaptive method requires delta", "delta")
    if method.kind in ("sam", "mix") and historical is None and cfg.get("informative") is None:
        raise ConfigError(
            "invalid_config",
            f"method {method.kind!r} needs an informative prior or a historical arm",
            "informative",
        )
    if method.kind == "pp" and historical is None:
        raise ConfigError(
            "invalid_config", "the power prior requires a historical arm", "historical"
        )

    informative, vague = _analysis_priors(endpoint, cfg, historical, control)

    if endpoint == "normal":
        assert isinstance(control, NormalSummary) and isinstance(treatment, NormalSummary)
        hist_n = historical if isinstance(historical, NormalSummary) else None
        sig_c = _pooled_sigma(control, hist_n, cfg.get("sigma_mode", "pooled"))
        if treatment.sd is None:
            raise ConfigError(
                "invalid_config", "treatment arm needs sd for a normal endpoint", "treatment.sd"
            )
        sig_t = treatment.sd
    else:
        sig_c = sig_t = None

    weight_record = None
    if method.kind == "np":
        post_c = np_posterior(vague, control, sigma_hat=sig_c)
    elif method.kind == "mix":
        assert informative is not None and method.w_tilde is not None
        post_c = fixed_mixture_posterior(
            informative, vague, method.w_tilde, control, sigma_hat=sig_c
        )
    elif method.kind == "sam":
        assert informative is not None and delta is not None
        post_c, sw = sam_posterior(informative, vague, delta, control, sigma_hat=sig_c)
        weight_record = sam_weight_to_dict(sw)
    else:
        assert historical is not None
        grid = method.gamma_grid if method.gamma_grid is not None else 101
        post_c = power_prior_posterior(
            vague, historical, control, grid_size=grid, sigma_hat=sig_c
        )

    post_t = np_posterior(vague, treatment, sigma_hat=sig_t)
    decision = evaluate_decision(post_t, post_c, cutoff)

    return {
        "endpoint": endpoint,
        "method": cfg["method"],
        "posterior_control": mixture_to_dict(post_c),
        "posterior_treatment": mixture_to_dict(post_t),
        "sam_weight": weight_record,
        "prob_superiority": decision.prob_superiority,
        "cutoff": decision.cutoff,
        "reject": decision.reject,
        "control_mean": decision.control_mean,
        "treatment_mean": decision.treatment_mean,
        "seed": None,
        "replicates": None,
        "software_version": __version__,
    }


def metrics_row(label: str, m: OCMetrics) -> dict:
    return {
        "scenario_label": label,
        "method": m.method.label,
        "cutoff": m.cutoff,
        "rejection_rate": m.rejection_rate,
        "bias": m.bias,
        "mse": m.mse,
        "relative_bias": m.relative_bias,
        "relative_mse": m.relative_mse,
        "mean_weight": m.mean_weight,
        "replicates": m.replicates,
        "seed": m.seed,
    }


def run_simulate(cfg: dict, progress: Callable[[float], None] | None = None) -> dict:
    """Calibrate-then-simulate a scenario batch; returns rows plus settings."""
    scenarios = []
    for i, sc in enumerate(cfg["scenarios"]):
        spec = parse_scenario(sc, f"scenarios[{i}]")
        if not spec.label:
            spec = replace(spec, label=f"scenario-{i + 1}")
        scenarios.append(spec)
    methods = parse_methods(cfg["methods"])
    seed = cfg.get("seed", 0)
    replicates = cfg.get("replicates", 2000)
    results = simulate_batch(
        scenarios,
        methods,
        alpha=cfg.get("alpha", 0.05),
        replicates=replicates,
        calibration_replicates=cfg.get("calibration_replicates", 10_000),
        seed=seed,
        calibration_seed=cfg.get("calibration_seed"),
        threads=cfg.get("threads", 1),
        progress=progress,
    )
    return {
        "rows": [metrics_row(label, m) for label, _, m in results],
        "alpha": cfg.get("alpha", 0.05),
        "seed": seed,
        "replicates": replicates,
        "calibration_replicates": cfg.get("calibration_replicates", 10_000),
        "software_version": __version__,
    }


def run_calibrate(cfg: dict, progress: Callable[[float], None] | None = None) -> dict:
    """Calibrate cutoffs for every method on a scenario's congruent null."""
    spec = parse_scenario(cfg["scenario"])
    methods = parse_methods(cfg["methods"])
    alpha = cfg.get("alpha", 0.05)
    replicates = cfg.get("replicates", 10_000)
    seed = cfg.get("seed", 0)
    threads = cfg.get("threads", 1)
    null = null_scenario(spec)

    cutoffs = []
    for i, method in enumerate(methods):
        cal = calibrate_cutoff(null, method, alpha, replicates, seed, threads)
        cutoffs.append(
            {
                "method": method.label,
                "cutoff": cal.cutoff,
                "alpha_target": cal.alpha_target,
                "replicates": cal.replicates,
                "seed": cal.seed,
            }
        )
        if progress is not None:
            progress((i + 1) / len(methods))
    return {
        "scenario_label": spec.label,
        "null_label": null.label,
        "cutoffs": cutoffs,
        "seed": seed,
        "replicates": replicates,
        "software_version": __version__,
    }


def run_curve(cfg: dict, progress: Callable[[float], None] | None = None) -> dict:
    """Mean adaptive weight across a grid of true control values."""
    spec = parse_scenario(cfg["scenario"])
    grid = resolve_theta_grid(cfg["theta_grid"])
    replicates = cfg.get("replicates", 2000)
    seed = cfg.get("seed", 0)
    points = weight_curve(spec, grid, replicates, seed)
    if progress is not None:
        progress(1.0)
    return {
        "scenario_label": spec.label,
        "theta": [t for t, _ in points],
        "mean_w": [w for _, w in points],
        "seed": seed,
        "replicates": replicates,
        "software_version": __version__,
    }


def _cell(value: Any) -> Any:
    return "" if value is None else value


def rows_to_csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def curve_to_csv_text(payload: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "mean_w"])
    for t, w in zip(payload["theta"], payload["mean_w"]):
        writer.writerow([t, w])
    return buf.getvalue()
