"""Weighted mixtures of conjugate Beta or Normal distributions.

A mixture of same-family conjugate components is the universal prior and
posterior representation in this package: conjugate updating maps a
mixture to a mixture of the same size, with component parameters updated
in closed form and component weights reweighted by marginal likelihoods.
All weight arithmetic is done in log space with log-sum-exp
normalization; the raw marginal-likelihood ratios underflow for the
sample sizes this package targets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, ndtr

__all__ = [
    "BetaComponent",
    "NormalComponent",
    "MixtureDistribution",
    "BinarySummary",
    "NormalSummary",
    "log_beta_function",
    "beta_log_marginal",
    "normal_log_marginal",
    "mixture_update",
    "mixture_mean",
    "mixture_cdf",
    "mixture_quantile",
    "beta_mixture",
    "normal_mixture",
    "mixture_to_dict",
    "mixture_from_dict",
]

_LOG_2PI = math.log(2.0 * math.pi)

# Above this, lgamma(a) - lgamma(a+b) is evaluated through a Stirling-series
# difference; the naive form loses ~6 digits to cancellation at a ~ 1e6.
_STIRLING_MIN = 30.0


@dataclass(frozen=True)
class BetaComponent:
    """Beta(a, b) component; both shapes strictly positive and finite."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError(f"Beta shapes must be finite, got ({self.a}, {self.b})")
        if self.a <= 0.0 or self.b <= 0.0:
            raise ValueError(f"Beta shapes must be positive, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)


@dataclass(frozen=True)
class NormalComponent:
    """Normal(m, v) component with mean m and variance v > 0."""

    m: float
    v: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m) and math.isfinite(self.v)):
            raise ValueError(f"Normal parameters must be finite, got ({self.m}, {self.v})")
        if self.v <= 0.0:
            raise ValueError(f"Normal variance must be positive, got {self.v}")

    @property
    def mean(self) -> float:
        return self.m


Component = BetaComponent | NormalComponent

_FAMILY_TYPES = {"beta": BetaComponent, "normal": NormalComponent}


@dataclass(frozen=True)
class MixtureDistribution:
    """Ordered weighted mixture of same-family conjugate components.

    Weights are non-negative and sum to one (within 1e-12 on input;
    stored as given). Components with negligible weight are retained,
    never pruned, so updates stay exact and deterministic.
    """

    family: str
    components: tuple[tuple[float, Component], ...]

    def __post_init__(self) -> None:
        ctype = _FAMILY_TYPES.get(self.family)
        if ctype is None:
            raise ValueError(f"unknown family {self.family!r}")
        if len(self.components) == 0:
            raise ValueError("mixture needs at least one component")
        total = 0.0
        for w, comp in self.components:
            if not isinstance(comp, ctype):
                raise ValueError(f"component {comp!r} does not belong to family {self.family!r}")
            if not math.isfinite(w) or w < 0.0:
                raise ValueError(f"mixture weight must be finite and >= 0, got {w}")
            total += w
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {total!r}")

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.components)


def beta_mixture(parts: list[tuple[float, float, float]] | tuple) -> MixtureDistribution:
    """Build a Beta mixture from (weight, a, b) triples."""
    return MixtureDistribution(
        "beta", tuple((w, BetaComponent(a, b)) for w, a, b in parts)
    )


def normal_mixture(parts: list[tuple[float, float, float]] | tuple) -> MixtureDistribution:
    """Build a Normal mixture from (weight, mean, variance) triples."""
    return MixtureDistribution(
        "normal", tuple((w, NormalComponent(m, v)) for w, m, v in parts)
    )


@dataclass(frozen=True)
class BinarySummary:
    """Sufficient statistics of one binary arm: x responses of n subjects."""

    x: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 0 or self.x < 0 or self.x > self.n:
            raise ValueError(f"need 0 <= x <= n, got x={self.x}, n={self.n}")


@dataclass(frozen=True)
class NormalSummary:
    """Sufficient statistics of one continuous arm.

    ``sd`` is the sample standard deviation (required for n >= 2, may be
    omitted for n <= 1); ``sum_sq_dev`` optionally carries the raw
    sum of squared deviations and must equal (n-1)*sd^2 when both are
    present.
    """

    n: int
    mean: float
    sd: float | None = None
    sum_sq_dev: float | None = None

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if not math.isfinite(self.mean):
            raise ValueError("mean must be finite")
        if self.sd is not None and self.sd <= 0.0:
            raise ValueError(f"sd must be positive, got {self.sd}")
        if self.n >= 2 and self.sd is None:
            raise ValueError("sd is required when n >= 2")
        if self.sum_sq_dev is not None:
            if self.sum_sq_dev < 0.0:
                raise ValueError("sum_sq_dev must be >= 0")
            if self.sd is not None and self.n >= 2:
                expected = (self.n - 1) * self.sd**2
                if abs(self.sum_sq_dev - expected) > 1e-9 * max(1.0, expected):
                    raise ValueError(
                        f"sum_sq_dev={self.sum_sq_dev} inconsistent with (n-1)*sd^2={expected}"
                    )


def _stirling_tail(z: float) -> float:
    # J(z) in lnGamma(z) = (z-1/2)ln z - z + ln(2*pi)/2 + J(z); z >= 30.
    zi = 1.0 / z
    z2 = zi * zi
    return zi * (
        1.0 / 12.0
        + z2 * (-1.0 / 360.0 + z2 * (1.0 / 1260.0 + z2 * (-1.0 / 1680.0 + z2 * (1.0 / 1188.0))))
    )


def _lgamma_diff(a: float, b: float) -> float:
    # lnGamma(a+b) - lnGamma(a) without cancellation; a >= _STIRLING_MIN, b >= 0.
    return (
        (a - 0.5) * math.log1p(b / a)
        + b * math.log(a + b)
        - b
        + _stirling_tail(a + b)
        - _stirling_tail(a)
    )


def log_beta_function(a: float, b: float) -> float:
    """Natural log of the Euler beta function B(a, b).

    Accurate to ~1e-13 relative over a, b in (0, 1e6]; the large-argument
    branch avoids the catastrophic cancellation of the plain
    lgamma(a) + lgamma(b) - lgamma(a+b) form.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0.0 or b <= 0.0:
        raise ValueError(f"log_beta_function needs positive finite arguments, got ({a}, {b})")
    if b > a:
        a, b = b, a
    if a >= _STIRLING_MIN:
        return math.lgamma(b) - _lgamma_diff(a, b)
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta_log_marginal(prior: BetaComponent, data: BinarySummary) -> float:
    """Log marginal likelihood of binary data under a Beta component.

    Returns ln[B(a+x, b+n-x) / B(a, b)]. The binomial coefficient is
    omitted by convention: it is common to every component and cancels
    in all weight ratios this package forms.
    """
    if data.n == 0:
        return 0.0
    return log_beta_function(prior.a + data.x, prior.b + data.n - data.x) - log_beta_function(
        prior.a, prior.b
    )


def normal_log_marginal(prior: NormalComponent, data: NormalSummary, sampling_var: float) -> float:
    """Log marginal density of the sample mean under a Normal component.

    The per-observation variance ``sampling_var`` is treated as known, so
    ybar ~ Normal(m, v + sampling_var/n). Empty data contributes 0.
    """
    if sampling_var <= 0.0 or not math.isfinite(sampling_var):
        raise ValueError(f"sampling_var must be positive, got {sampling_var}")
    if data.n == 0:
        return 0.0
    var = prior.v + sampling_var / data.n
    resid = data.mean - prior.m
    return -0.5 * (_LOG_2PI + math.log(var) + resid * resid / var)


def _update_component(
    comp: Component, data: BinarySummary | NormalSummary, sampling_var: float | None
) -> tuple[Component, float]:
    """Conjugate-update one component, returning (posterior, log marginal)."""
    if isinstance(comp, BetaComponent):
        assert isinstance(data, BinarySummary)
        post = BetaComponent(comp.a + data.x, comp.b + data.n - data.x)
        return post, beta_log_marginal(comp, data)
    assert isinstance(data, NormalSummary)
    assert sampling_var is not None
    if data.n == 0:
        return comp, 0.0
    prec = 1.0 / comp.v + data.n / sampling_var
    mean = (comp.m / comp.v + data.n * data.mean / sampling_var) / prec
    return NormalComponent(mean, 1.0 / prec), normal_log_marginal(comp, data, sampling_var)


def mixture_update(
    prior: MixtureDistribution,
    data: BinarySummary | NormalSummary,
    sampling_var: float | None = None,
) -> MixtureDistribution:
    """Exact conjugate posterior of a mixture prior given summary data.

    Every component is updated in closed form; the posterior weight of
    component k is proportional to its prior weight times its marginal
    likelihood, normalized in log space.
    """
    if prior.family == "beta":
        if not isinstance(data, BinarySummary):
            raise ValueError("beta mixture requires BinarySummary data")
    else:
        if not isinstance(data, NormalSummary):
            raise ValueError("normal mixture requires NormalSummary data")
        if sampling_var is None:
            raise ValueError("normal mixture update requires sampling_var")

    posts: list[Component] = []
    log_w: list[float] = []
    for w, comp in prior.components:
        post, log_m = _update_component(comp, data, sampling_var)
        posts.append(post)
        log_w.append((math.log(w) if w > 0.0 else -math.inf) + log_m)

    shift = max(log_w)
    if not math.isfinite(shift):
        raise ValueError("all mixture components have zero posterior weight")
    raw = [math.exp(lw - shift) for lw in log_w]
    total = sum(raw)
    weights = [r / total for r in raw]
    return MixtureDistribution(prior.family, tuple(zip(weights, posts)))


def mixture_mean(d: MixtureDistribution) -> float:
    """Weighted mean: sum of w_k * mean_k."""
    return sum(w * comp.mean for w, comp in d.components)


def mixture_cdf(d: MixtureDistribution, t: float) -> float:
    """Mixture CDF at t; Beta via regularized incomplete beta, Normal via erf."""
    if d.family == "beta":
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return 1.0
        return float(sum(w * betainc(c.a, c.b, t) for w, c in d.components))
    return float(sum(w * ndtr((t - c.m) / math.sqrt(c.v)) for w, c in d.components))


def mixture_quantile(d: MixtureDistribution, p: float) -> float:
    """Inverse CDF by monotone bisection, to 1e-9 absolute on the argument."""
    if not (0.0 < p < 1.0):
        raise ValueError(f"quantile level must lie in (0, 1), got {p}")
    if d.family == "beta":
        lo, hi = 0.0, 1.0
    else:
        lo = min(c.m - 10.0 * math.sqrt(c.v) for _, c in d.components)
        hi = max(c.m + 10.0 * math.sqrt(c.v) for _, c in d.components)
        while mixture_cdf(d, lo) > p:
            lo -= (hi - lo)
        while mixture_cdf(d, hi) < p:
            hi += (hi - lo)
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if mixture_cdf(d, mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mixture_to_dict(d: MixtureDistribution) -> dict:
    """JSON-ready form; floats round-trip exactly through repr/json."""
    comps = []
    for w, c in d.components:
        if isinstance(c, BetaComponent):
            comps.append({"w": w, "a": c.a, "b": c.b})
        else:
            comps.append({"w": w, "m": c.m, "v": c.v})
    return {"family": d.family, "components": comps}


def mixture_from_dict(obj: dict) -> MixtureDistribution:
    family = obj["family"]
    if family == "beta":
        return beta_mixture([(c["w"], c["a"], c["b"]) for c in obj["components"]])
    if family == "normal":
        return normal_mixture([(c["w"], c["m"], c["v"]) for c in obj["components"]])
    raise ValueError(f"unknown family {family!r}")
