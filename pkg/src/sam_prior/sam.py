"""Self-adapting mixture weight and prior construction.

The mixture weight w measures how compatible the current control data
are with the historical point estimate theta_h_hat, on the scale of a
clinically significant difference delta. It is built from the likelihood
ratio

    R = p(D | theta = theta_h_hat) / p(D | theta = theta_h_hat +/- delta),

where the denominator takes whichever shift is better supported by the
data, and w = R / (1 + R). Large R means the historical estimate
explains the current data far better than either shifted alternative,
so nearly all prior mass goes to the informative component; R near zero
routes the mass to the vague component instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .mixtures import (
    BinarySummary,
    MixtureDistribution,
    NormalSummary,
    mixture_mean,
    mixture_update,
)

__all__ = [
    "SamWeight",
    "estimate_theta_h",
    "sam_weight_binary",
    "sam_weight_normal",
    "build_sam_prior",
    "sam_posterior",
    "sam_weight_to_dict",
    "sam_weight_from_dict",
]


@dataclass(frozen=True)
class SamWeight:
    """Mixture weight along with the quantities that produced it.

    log_r is the log likelihood ratio, w = 1 / (1 + exp(-log_r))
    evaluated stably so it saturates at exact 0 and 1 for extreme
    conflict or agreement. theta_h_hat is the historical point estimate
    the ratio is anchored at and delta the clinically significant
    difference, both in endpoint units. side_used records which shifted
    alternative attained the denominator maximum, "plus" or "minus";
    "both_invalid_fallback" marks the no-evidence case (empty current
    data) where the weight defaults to 1/2.
    """

    log_r: float
    w: float
    theta_h_hat: float
    delta: float
    side_used: str


def _weight_from_log_r(log_r: float) -> float:
    # Logistic in the numerically safe branch: exp is only ever taken of
    # a non-positive argument, so it underflows to 0 instead of overflowing.
    if log_r >= 0.0:
        return 1.0 / (1.0 + math.exp(-log_r))
    r = math.exp(log_r)
    return r / (1.0 + r)


def estimate_theta_h(informative: MixtureDistribution) -> float:
    """Historical point estimate: the mean of the informative prior.

    For a single Beta(a + x_h, b + n_h - x_h) component this is the
    usual smoothed historical rate (a + x_h) / (a + b + n_h).
    """
    return mixture_mean(informative)


def _binary_log_lik(theta: float, data: BinarySummary) -> float:
    # Bernoulli log likelihood up to the binomial coefficient; only
    # called with theta strictly inside (0, 1).
    return data.x * math.log(theta) + (data.n - data.x) * math.log1p(-theta)


def sam_weight_binary(theta_h_hat: float, delta: float, data: BinarySummary) -> SamWeight:
    """Mixture weight for a binary endpoint.

    The likelihood ratio compares the current data at theta_h_hat
    against the better of theta_h_hat + delta and theta_h_hat - delta.
    A shifted value outside (0, 1) is excluded from the comparison; it
    is an error for both shifts to fall outside, since delta is then
    incompatible with the historical rate.
    """
    if not (0.0 < theta_h_hat < 1.0):
        raise ValueError(f"theta_h_hat must lie in (0, 1), got {theta_h_hat}")
    if delta <= 0.0 or not math.isfinite(delta):
        raise ValueError(f"delta must be positive, got {delta}")

    candidates: list[tuple[float, str]] = []
    if theta_h_hat + delta < 1.0:
        candidates.append((theta_h_hat + delta, "plus"))
    if theta_h_hat - delta > 0.0:
        candidates.append((theta_h_hat - delta, "minus"))
    if not candidates:
        raise ValueError(
            f"delta={delta} incompatible with theta_h_hat={theta_h_hat}: "
            "both shifted alternatives fall outside (0, 1)"
        )
    if data.n == 0:
        return SamWeight(0.0, 0.5, theta_h_hat, delta, "both_invalid_fallback")

    num = _binary_log_lik(theta_h_hat, data)
    # Ties go to "plus": the list is ordered and max() keeps the first
    # of equal keys, so the reported side is deterministic.
    denom, side = max(
        ((_binary_log_lik(t, data), s) for t, s in candidates), key=lambda p: p[0]
    )
    log_r = num - denom
    return SamWeight(log_r, _weight_from_log_r(log_r), theta_h_hat, delta, side)


def sam_weight_normal(
    theta_h_hat: float, delta: float, sigma_hat: float, data: NormalSummary
) -> SamWeight:
    """Mixture weight for a continuous endpoint with estimated dispersion.

    With ybar the current mean and n the current sample size, the log
    likelihood ratio collapses to the closed form

        log R = -(n * delta / (2 * sigma_hat^2)) * (2|ybar - theta_h_hat| - delta),

    obtained by expanding the shifted sum of squares: both shifts share
    the quadratic term, so only the cross terms survive and the better
    shift is always the one lying toward the data. The sign flips
    exactly where |ybar - theta_h_hat| crosses delta / 2.
    """
    if delta <= 0.0 or not math.isfinite(delta):
        raise ValueError(f"delta must be positive, got {delta}")
    if sigma_hat <= 0.0 or not math.isfinite(sigma_hat):
        raise ValueError(f"sigma_hat must be positive, got {sigma_hat}")
    if data.n == 0:
        return SamWeight(0.0, 0.5, theta_h_hat, delta, "both_invalid_fallback")

    gap = data.mean - theta_h_hat
    log_r = -(data.n * delta / (2.0 * sigma_hat * sigma_hat)) * (2.0 * abs(gap) - delta)
    side = "plus" if gap >= 0.0 else "minus"
    return SamWeight(log_r, _weight_from_log_r(log_r), theta_h_hat, delta, side)


def build_sam_prior(
    informative: MixtureDistribution, vague: MixtureDistribution, w: float
) -> MixtureDistribution:
    """Blend the two priors: w * informative + (1 - w) * vague.

    Component weights of each ingredient are scaled by w and 1 - w and
    concatenated, informative components first. The degenerate weights
    return the corresponding ingredient unchanged, keeping the component
    count minimal when the weight has saturated.
    """
    if not (0.0 <= w <= 1.0):
        raise ValueError(f"mixture weight must lie in [0, 1], got {w}")
    if informative.family != vague.family:
        raise ValueError(f"cannot mix families {informative.family!r} and {vague.family!r}")
    if w == 1.0:
        return informative
    if w == 0.0:
        return vague
    parts = [(w * wk, c) for wk, c in informative.components]
    parts += [((1.0 - w) * wk, c) for wk, c in vague.components]
    return MixtureDistribution(informative.family, tuple(parts))


def sam_posterior(
    informative: MixtureDistribution,
    vague: MixtureDistribution,
    delta: float,
    data: BinarySummary | NormalSummary,
    sigma_hat: float | None = None,
) -> tuple[MixtureDistribution, SamWeight]:
    """Full pipeline: weight from data, blended prior, conjugate posterior.

    theta_h_hat is always recomputed from the informative prior so the
    prior and the weight cannot disagree. Normal endpoints require
    sigma_hat, which serves both the likelihood ratio and the conjugate
    update (as the known per-observation standard deviation).
    """
    theta_h_hat = estimate_theta_h(informative)
    if informative.family == "beta":
        if not isinstance(data, BinarySummary):
            raise ValueError("beta priors require BinarySummary data")
        weight = sam_weight_binary(theta_h_hat, delta, data)
        prior = build_sam_prior(informative, vague, weight.w)
        return mixture_update(prior, data), weight
    if not isinstance(data, NormalSummary):
        raise ValueError("normal priors require NormalSummary data")
    if sigma_hat is None:
        raise ValueError("normal endpoint requires sigma_hat")
    weight = sam_weight_normal(theta_h_hat, delta, sigma_hat, data)
    prior = build_sam_prior(informative, vague, weight.w)
    return mixture_update(prior, data, sampling_var=sigma_hat * sigma_hat), weight


def sam_weight_to_dict(s: SamWeight) -> dict:
    return {
        "log_r": s.log_r,
        "w": s.w,
        "theta_h_hat": s.theta_h_hat,
        "delta": s.delta,
        "side_used": s.side_used,
    }


def sam_weight_from_dict(obj: dict) -> SamWeight:
    return SamWeight(
        log_r=float(obj["log_r"]),
        w=float(obj["w"]),
        theta_h_hat=float(obj["theta_h_hat"]),
        delta=float(obj["delta"]),
        side_used=str(obj["side_used"]),
    )
