"""Scenario-driven Monte Carlo engine for operating characteristics.

A scenario pins the truth (control and treatment parameters), the
sample sizes, the historical data (fixed, not resampled), and the prior
settings. The engine simulates replicate trials, analyzes every
replicate with each requested method on the same simulated data
(common random numbers), calibrates per-method decision cutoffs on the
congruent null scenario, and reduces everything to rejection rate,
bias, and MSE of the control posterior mean.

Determinism contract: replicate r draws from the substream
SeedSequence(seed, spawn_key=(r,)), control arm first, treatment arm
second. Results are accumulated into index-ordered arrays before any
reduction, so the output is byte-identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .comparators import (
    MethodSpec,
    fixed_mixture_posterior,
    np_posterior,
    power_prior_posterior,
)
from .decision import prob_superiority
from .mixtures import (
    BinarySummary,
    MixtureDistribution,
    NormalSummary,
    beta_mixture,
    mixture_mean,
    mixture_update,
    normal_mixture,
)
from .sam import estimate_theta_h, sam_posterior, sam_weight_binary, sam_weight_normal

__all__ = [
    "ScenarioSpec",
    "CalibrationResult",
    "OCMetrics",
    "build_historical",
    "informative_prior",
    "replicate_rng",
    "generate_replicate",
    "analyze_replicate",
    "calibrate_cutoff",
    "run_oc",
    "weight_curve",
    "relative_metrics",
    "null_scenario",
    "simulate_batch",
]

# Replicates are dispatched to workers in fixed blocks of this size;
# the block size is part of the determinism contract only in that it
# must not depend on the worker count (it never does).
_CHUNK = 64


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation scenario.

    The historical control arm is given either as (theta_h, n_h), from
    which a fixed summary is constructed, or as a ready-made informative
    prior mixture (applications where only a meta-analytic summary of
    several past trials is available). Exactly one of the two forms must
    be present.

    sigma_mode selects the dispersion estimate used for the control-arm
    analyses of a normal endpoint: "pooled" combines the current control
    sample with the historical one, "current" uses the current sample
    alone. The treatment arm always uses its own sample dispersion.
    """

    endpoint: str
    theta: float
    n: int
    theta_t: float
    n_t: int
    delta: float
    theta_h: float | None = None
    n_h: int | None = None
    informative: MixtureDistribution | None = None
    sigma: float | None = None
    vague: MixtureDistribution | None = None
    sigma_mode: str = "pooled"
    label: str = ""

    def __post_init__(self) -> None:
        if self.endpoint not in ("binary", "normal"):
            raise ValueError(f"endpoint must be 'binary' or 'normal', got {self.endpoint!r}")
        if self.n < 1 or self.n_t < 1:
            raise ValueError("sample sizes must be positive")
        if self.delta <= 0.0 or not math.isfinite(self.delta):
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.sigma_mode not in ("pooled", "current"):
            raise ValueError(f"sigma_mode must be 'pooled' or 'current', got {self.sigma_mode!r}")

        has_summary = self.theta_h is not None or self.n_h is not None
        if has_summary and (self.theta_h is None or self.n_h is None):
            raise ValueError("theta_h and n_h must be given together")
        if has_summary == (self.informative is not None):
            raise ValueError(
                "give the historical arm either as (theta_h, n_h) or as an "
                "informative prior mixture, not both and not neither"
            )
        if self.n_h is not None and self.n_h < 1:
            raise ValueError("n_h must be positive")

        if self.endpoint == "binary":
            if self.sigma is not None:
                raise ValueError("sigma applies to normal endpoints only")
            for name, value in (("theta", self.theta), ("theta_t", self.theta_t)):
                if not (0.0 <= value <= 1.0):
                    raise ValueError(f"{name} must lie in [0, 1], got {value}")
            if self.theta_h is not None and not (0.0 < self.theta_h < 1.0):
                raise ValueError(f"theta_h must lie in (0, 1), got {self.theta_h}")
        else:
            if self.sigma is None or self.sigma <= 0.0:
                raise ValueError("normal endpoint requires sigma > 0")
            if self.n < 2 or self.n_t < 2:
                raise ValueError("normal endpoint needs at least 2 subjects per arm")

        family = "beta" if self.endpoint == "binary" else "normal"
        for name, mix in (("informative", self.informative), ("vague", self.vague)):
            if mix is not None and mix.family != family:
                raise ValueError(f"{name} prior family {mix.family!r} does not match endpoint")


def build_historical(spec: ScenarioSpec) -> BinarySummary | NormalSummary:
    """Fixed historical summary implied by (theta_h, n_h).

    Binary: x_h is theta_h * n_h rounded half away from zero, so the
    observed historical rate is as close to theta_h as the integer
    constraint allows. Normal: the summary has mean exactly theta_h and
    standard deviation exactly sigma, mimicking a historical trial that
    happened to land on the truth.
    """
    if spec.theta_h is None or spec.n_h is None:
        raise ValueError("historical summary requires theta_h and n_h")
    if spec.endpoint == "binary":
        x_h = int(math.floor(spec.theta_h * spec.n_h + 0.5))
        if not (0 <= x_h <= spec.n_h):
            raise ValueError(f"round(theta_h * n_h) = {x_h} outside [0, {spec.n_h}]")
        return BinarySummary(x=x_h, n=spec.n_h)
    return NormalSummary(n=spec.n_h, mean=spec.theta_h, sd=spec.sigma)


def _default_vague(spec: ScenarioSpec, center: float) -> MixtureDistribution:
    if spec.endpoint == "binary":
        return beta_mixture([(1.0, 1.0, 1.0)])
    # Unit-information prior: one observation's worth of precision,
    # centered at the historical mean.
    assert spec.sigma is not None
    return normal_mixture([(1.0, center, spec.sigma**2)])


def informative_prior(spec: ScenarioSpec) -> MixtureDistribution:
    """Informative prior for the control parameter.

    Supplied mixtures are used as-is. Otherwise, binary scenarios take
    the vague prior conjugately updated by the historical summary, and
    normal scenarios center a single component at the historical mean
    with its squared standard error as variance.
    """
    return _context(spec).informative


@dataclass(frozen=True)
class _Context:
    historical: BinarySummary | NormalSummary | None
    informative: MixtureDistribution
    vague: MixtureDistribution
    theta_h_hat: float


@lru_cache(maxsize=256)
def _context(spec: ScenarioSpec) -> _Context:
    if spec.informative is not None:
        informative = spec.informative
        historical = None
        center = estimate_theta_h(informative)
        vague = spec.vague if spec.vague is not None else _default_vague(spec, center)
    else:
        historical = build_historical(spec)
        center = spec.theta_h if spec.theta_h is not None else 0.0
        vague = spec.vague if spec.vague is not None else _default_vague(spec, center)
        if spec.endpoint == "binary":
            informative = mixture_update(vague, historical)
        else:
            assert isinstance(historical, NormalSummary) and historical.sd is not None
            informative = normal_mixture(
                [(1.0, historical.mean, historical.sd**2 / historical.n)]
            )
    return _Context(historical, informative, vague, estimate_theta_h(informative))


def replicate_rng(seed: int, rep: int) -> np.random.Generator:
    """Independent substream for one replicate, stable under parallelism."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(rep,)))


def generate_replicate(
    spec: ScenarioSpec, rng: np.random.Generator
) -> tuple[BinarySummary, BinarySummary] | tuple[NormalSummary, NormalSummary]:
    """Draw one trial: control arm first, then treatment, from one stream."""
    if spec.endpoint == "binary":
        x_c = int(rng.binomial(spec.n, spec.theta))
        x_t = int(rng.binomial(spec.n_t, spec.theta_t))
        return BinarySummary(x=x_c, n=spec.n), BinarySummary(x=x_t, n=spec.n_t)
    assert spec.sigma is not None
    y_c = rng.normal(spec.theta, spec.sigma, size=spec.n)
    y_t = rng.normal(spec.theta_t, spec.sigma, size=spec.n_t)
    control = NormalSummary(n=spec.n, mean=float(y_c.mean()), sd=float(y_c.std(ddof=1)))
    treatment = NormalSummary(n=spec.n_t, mean=float(y_t.mean()), sd=float(y_t.std(ddof=1)))
    return control, treatment


def _control_sigma(spec: ScenarioSpec, ctx: _Context, control: NormalSummary) -> float:
    assert control.sd is not None
    if spec.sigma_mode == "current" or ctx.historical is None:
        return control.sd
    hist = ctx.historical
    assert isinstance(hist, NormalSummary) and hist.sd is not None
    pooled = ((control.n - 1) * control.sd**2 + (hist.n - 1) * hist.sd**2) / (
        control.n + hist.n - 2
    )
    return math.sqrt(pooled)


def analyze_replicate(
    spec: ScenarioSpec,
    method: MethodSpec,
    control: BinarySummary | NormalSummary,
    treatment: BinarySummary | NormalSummary,
) -> tuple[MixtureDistribution, MixtureDistribution, float, float | None]:
    """Analyze one simulated trial with one method.

    The treatment arm is always analyzed with the vague prior; the
    control arm according to the method. Returns the two posteriors,
    the superiority probability, and the realized mixture weight where
    the method has one (the adaptive weight, or the fixed w_tilde).
    """
    ctx = _context(spec)
    weight: float | None = None

    if spec.endpoint == "binary":
        sig_c = sig_t = None
    else:
        assert isinstance(control, NormalSummary) and isinstance(treatment, NormalSummary)
        sig_c = _control_sigma(spec, ctx, control)
        sig_t = treatment.sd

    post_t = np_posterior(ctx.vague, treatment, sigma_hat=sig_t)

    if method.kind == "np":
        post_c = np_posterior(ctx.vague, control, sigma_hat=sig_c)
    elif method.kind == "mix":
        assert method.w_tilde is not None
        post_c = fixed_mixture_posterior(
            ctx.informative, ctx.vague, method.w_tilde, control, sigma_hat=sig_c
        )
        weight = method.w_tilde
    elif method.kind == "sam":
        post_c, sw = sam_posterior(
            ctx.informative, ctx.vague, spec.delta, control, sigma_hat=sig_c
        )
        weight = sw.w
    else:
        if ctx.historical is None:
            raise ValueError(
                "power prior requires raw historical data (theta_h, n_h), "
                "not a precomputed informative mixture"
            )
        grid = method.gamma_grid if method.gamma_grid is not None else 101
        post_c = power_prior_posterior(
            ctx.vague, ctx.historical, control, grid_size=grid, sigma_hat=sig_c
        )

    prob = prob_superiority(post_t, post_c)
    return post_c, post_t, prob, weight


def _run_chunk(
    spec: ScenarioSpec, methods: tuple[MethodSpec, ...], start: int, stop: int, seed: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-replicate superiority probs, control posterior means, weights."""
    count = stop - start
    probs = np.empty((count, len(methods)))
    means = np.empty((count, len(methods)))
    weights = np.full((count, len(methods)), np.nan)
    for i in range(count):
        rng = replicate_rng(seed, start + i)
        control, treatment = generate_replicate(spec, rng)
        for j, method in enumerate(methods):
            post_c, _, prob, w = analyze_replicate(spec, method, control, treatment)
            probs[i, j] = prob
            means[i, j] = mixture_mean(post_c)
            if w is not None:
                weights[i, j] = w
    return probs, means, weights


def _simulate_columns(
    spec: ScenarioSpec,
    methods: tuple[MethodSpec, ...],
    replicates: int,
    seed: int,
    threads: int,
    progress: Callable[[float], None] | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    spans = [(s, min(s + _CHUNK, replicates)) for s in range(0, replicates, _CHUNK)]
    parts: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    if threads <= 1:
        for k, (start, stop) in enumerate(spans):
            parts.append(_run_chunk(spec, methods, start, stop, seed))
            if progress is not None:
                progress((k + 1) / len(spans))
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_run_chunk, spec, methods, start, stop, seed)
                for start, stop in spans
            ]
            # Collection stays in submission order; completion order is
            # irrelevant to the reduced arrays.
            for k, fut in enumerate(futures):
                parts.append(fut.result())
                if progress is not None:
                    progress((k + 1) / len(spans))
    probs = np.concatenate([p for p, _, _ in parts])
    means = np.concatenate([m for _, m, _ in parts])
    weights = np.concatenate([w for _, _, w in parts])
    return probs, means, weights


@dataclass(frozen=True)
class CalibrationResult:
    method: MethodSpec
    cutoff: float
    alpha_target: float
    replicates: int
    seed: int


def calibrate_cutoff(
    spec_null: ScenarioSpec,
    method: MethodSpec,
    alpha: float,
    replicates: int,
    seed: int,
    threads: int = 1,
    progress: Callable[[float], None] | None = None,
) -> CalibrationResult:
    """Decision threshold giving empirical size <= alpha under the null.

    Simulates the congruent null scenario (theta_t equal to theta, both
    at the historical value) and takes the ceil((1 - alpha) * R)-th
    order statistic of the superiority probabilities, so the strict
    rejection rule fires on at most an alpha fraction of replicates.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if replicates < 1000:
        raise ValueError(f"calibration needs at least 1000 replicates, got {replicates}")
    if spec_null.theta_t != spec_null.theta:
        raise ValueError("null scenario requires theta_t == theta")
    probs, _, _ = _simulate_columns(spec_null, (method,), replicates, seed, threads, progress)
    order = int(math.ceil((1.0 - alpha) * replicates))
    cutoff = float(np.sort(probs[:, 0])[order - 1])
    if not (0.0 < cutoff < 1.0):
        raise ValueError(f"degenerate calibrated cutoff {cutoff}")
    return CalibrationResult(
        method=method, cutoff=cutoff, alpha_target=alpha, replicates=replicates, seed=seed
    )


@dataclass(frozen=True)
class OCMetrics:
    """Operating characteristics of one method on one scenario."""

    method: MethodSpec
    cutoff: float
    rejection_rate: float
    bias: float
    mse: float
    relative_bias: float
    relative_mse: float
    mean_weight: float | None
    replicates: int
    seed: int


def run_oc(
    spec: ScenarioSpec,
    methods: Sequence[MethodSpec],
    cutoffs: Sequence[float],
    replicates: int,
    seed: int,
    threads: int = 1,
    progress: Callable[[float], None] | None = None,
) -> list[OCMetrics]:
    """Operating characteristics of every method on a shared replicate stream.

    All methods see identical simulated trials, so between-method
    contrasts carry no extra Monte Carlo noise. Bias and MSE measure
    the control posterior mean against the true theta; relative values
    subtract the non-informative method's bias and MSE from the same
    stream, computing that reference internally when it was not
    requested.
    """
    if len(cutoffs) != len(methods):
        raise ValueError("need exactly one cutoff per method")
    if replicates < 1:
        raise ValueError("replicates must be positive")

    columns = tuple(methods)
    np_index = next((j for j, m in enumerate(columns) if m.kind == "np"), None)
    if np_index is None:
        columns = columns + (MethodSpec("np"),)
        np_index = len(columns) - 1

    probs, means, weights = _simulate_columns(spec, columns, replicates, seed, threads, progress)
    errors = means - spec.theta
    bias = errors.mean(axis=0)
    mse = (errors**2).mean(axis=0)

    out: list[OCMetrics] = []
    for j, method in enumerate(methods):
        col_w = weights[:, j]
        has_w = not np.all(np.isnan(col_w))
        out.append(
            OCMetrics(
                method=method,
                cutoff=float(cutoffs[j]),
                rejection_rate=float(np.mean(probs[:, j] > cutoffs[j])),
                bias=float(bias[j]),
                mse=float(mse[j]),
                relative_bias=float(bias[j] - bias[np_index]),
                relative_mse=float(mse[j] - mse[np_index]),
                mean_weight=float(np.mean(col_w)) if has_w else None,
                replicates=replicates,
                seed=seed,
            )
        )
    return out


def relative_metrics(target: OCMetrics, reference_np: OCMetrics) -> OCMetrics:
    """Re-derive relative bias and MSE against a given reference run."""
    if reference_np.method.kind != "np":
        raise ValueError("reference must be the non-informative method")
    if (target.seed, target.replicates) != (reference_np.seed, reference_np.replicates):
        raise ValueError("target and reference come from different replicate streams")
    return replace(
        target,
        relative_bias=target.bias - reference_np.bias,
        relative_mse=target.mse - reference_np.mse,
    )


def _replicate_weight(spec: ScenarioSpec, ctx: _Context, rng: np.random.Generator) -> float:
    control, _ = generate_replicate(spec, rng)
    if spec.endpoint == "binary":
        assert isinstance(control, BinarySummary)
        return sam_weight_binary(ctx.theta_h_hat, spec.delta, control).w
    assert isinstance(control, NormalSummary)
    sig = _control_sigma(spec, ctx, control)
    return sam_weight_normal(ctx.theta_h_hat, spec.delta, sig, control).w


def weight_curve(
    spec: ScenarioSpec, theta_grid: Sequence[float], replicates: int, seed: int
) -> list[tuple[float, float]]:
    """Mean realized adaptive weight as the true control parameter moves.

    Each grid value reuses the same replicate substreams, so the curve
    is smooth in theta up to the weight's own sensitivity.
    """
    if replicates < 1:
        raise ValueError("replicates must be positive")
    out: list[tuple[float, float]] = []
    for theta in theta_grid:
        shifted = replace(spec, theta=float(theta))
        ctx = _context(shifted)
        acc = np.empty(replicates)
        for rep in range(replicates):
            acc[rep] = _replicate_weight(shifted, ctx, replicate_rng(seed, rep))
        out.append((float(theta), float(acc.mean())))
    return out


def null_scenario(spec: ScenarioSpec) -> ScenarioSpec:
    """Congruent null companion: both truths moved to the historical value.

    The label is canonical (derived from the null parameter, not the
    source scenario), so every scenario of a block maps to the same
    null spec and one calibration serves the whole block.
    """
    theta_null = spec.theta_h if spec.theta_h is not None else _context(spec).theta_h_hat
    return replace(spec, theta=theta_null, theta_t=theta_null, label=f"null@{theta_null:g}")


def simulate_batch(
    scenarios: Sequence[ScenarioSpec],
    methods: Sequence[MethodSpec],
    alpha: float = 0.05,
    replicates: int = 2000,
    calibration_replicates: int = 10_000,
    seed: int = 0,
    calibration_seed: int | None = None,
    threads: int = 1,
    progress: Callable[[float], None] | None = None,
) -> list[tuple[str, CalibrationResult, OCMetrics]]:
    """Calibrate-then-simulate over a scenario batch.

    Cutoffs are calibrated once per distinct null scenario and method,
    then shared by every scenario with the same null (a whole table
    block reuses one calibration). The calibration stream is decoupled
    from the reporting stream by seeding it at calibration_seed, which
    defaults to seed + 1.
    """
    if calibration_seed is None:
        calibration_seed = seed + 1
    cache: dict[tuple[ScenarioSpec, MethodSpec], CalibrationResult] = {}
    total_steps = len(scenarios) * (len(methods) + 1)
    done = 0

    def step() -> None:
        nonlocal done
        done += 1
        if progress is not None:
            progress(done / total_steps)

    results: list[tuple[str, CalibrationResult, OCMetrics]] = []
    for spec in scenarios:
        null = null_scenario(spec)
        calibrations: list[CalibrationResult] = []
        for method in methods:
            key = (null, method)
            cal = cache.get(key)
            if cal is None:
                cal = calibrate_cutoff(
                    null, method, alpha, calibration_replicates, calibration_seed, threads
                )
                cache[key] = cal
            calibrations.append(cal)
            step()
        metrics = run_oc(
            spec, methods, [c.cutoff for c in calibrations], replicates, seed, threads
        )
        step()
        results.extend(
            (spec.label, cal, m) for cal, m in zip(calibrations, metrics)
        )
    return results
