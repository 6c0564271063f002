"""Reference analysis methods the self-adapting prior is benchmarked against.

Three comparators share the conjugate-mixture plumbing: the
non-informative analysis that ignores historical data, the fixed-weight
(robust meta-analytic) mixture, and a normalized power prior whose
discounting exponent gets a uniform prior discretized on a midpoint
grid. Each returns the full control-arm posterior as a mixture, so the
decision layer does not care which method produced it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .mixtures import (
    BetaComponent,
    BinarySummary,
    MixtureDistribution,
    NormalComponent,
    NormalSummary,
    mixture_update,
)
from .sam import build_sam_prior

__all__ = [
    "MethodSpec",
    "method_spec_to_dict",
    "method_spec_from_dict",
    "UnsupportedMethodError",
    "np_posterior",
    "fixed_mixture_posterior",
    "power_prior_posterior",
]

_KINDS = ("np", "mix", "sam", "pp")


class UnsupportedMethodError(ValueError):
    """Raised for analysis-method kinds this package deliberately omits."""


def _reject_kind(kind: str) -> UnsupportedMethodError:
    msg = f"unsupported method kind {kind!r}: expected one of {', '.join(_KINDS)}"
    if kind in ("cp", "commensurate"):
        msg += " (the commensurate prior is intentionally not implemented)"
    return UnsupportedMethodError(msg)


@dataclass(frozen=True)
class MethodSpec:
    """One analysis method: kind plus the parameter that kind requires.

    "np" and "sam" take no extra parameter, "mix" requires w_tilde in
    [0, 1], and "pp" uses gamma_grid points for the discounting exponent
    (defaulting to 101 when left unset). Parameters belonging to another
    kind must be absent.
    """

    kind: str
    w_tilde: float | None = None
    gamma_grid: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise _reject_kind(self.kind)
        if self.kind == "mix":
            if self.w_tilde is None:
                raise ValueError("method kind 'mix' requires w_tilde")
            if not (0.0 <= self.w_tilde <= 1.0):
                raise ValueError(f"w_tilde must lie in [0, 1], got {self.w_tilde}")
        elif self.w_tilde is not None:
            raise ValueError(f"w_tilde is only valid for kind 'mix', not {self.kind!r}")
        if self.kind == "pp":
            if self.gamma_grid is None:
                object.__setattr__(self, "gamma_grid", 101)
            elif self.gamma_grid < 2:
                raise ValueError(f"gamma_grid must be >= 2, got {self.gamma_grid}")
        elif self.gamma_grid is not None:
            raise ValueError(f"gamma_grid is only valid for kind 'pp', not {self.kind!r}")

    @property
    def label(self) -> str:
        """Stable display name, e.g. "mix(0.5)" or "pp"."""
        if self.kind == "mix":
            w = self.w_tilde
            text = f"{w:g}" if w is not None else "?"
            return f"mix({text})"
        return self.kind


def method_spec_to_dict(m: MethodSpec) -> dict:
    out: dict = {"kind": m.kind}
    if m.w_tilde is not None:
        out["w_tilde"] = m.w_tilde
    if m.kind == "pp":
        out["gamma_grid"] = m.gamma_grid
    return out


def method_spec_from_dict(obj: dict) -> MethodSpec:
    kind = obj.get("kind")
    if not isinstance(kind, str) or kind not in _KINDS:
        raise _reject_kind(str(kind))
    return MethodSpec(
        kind=kind,
        w_tilde=obj.get("w_tilde"),
        gamma_grid=obj.get("gamma_grid"),
    )


def _sampling_var(family: str, sigma_hat: float | None) -> float | None:
    if family != "normal":
        return None
    if sigma_hat is None or sigma_hat <= 0.0:
        raise ValueError("normal endpoint requires a positive sigma_hat")
    return sigma_hat * sigma_hat


def np_posterior(
    vague: MixtureDistribution,
    data: BinarySummary | NormalSummary,
    sigma_hat: float | None = None,
) -> MixtureDistribution:
    """Posterior ignoring historical data: conjugate update of the vague prior."""
    return mixture_update(vague, data, sampling_var=_sampling_var(vague.family, sigma_hat))


def fixed_mixture_posterior(
    informative: MixtureDistribution,
    vague: MixtureDistribution,
    w_tilde: float,
    data: BinarySummary | NormalSummary,
    sigma_hat: float | None = None,
) -> MixtureDistribution:
    """Posterior under a mixture prior with prespecified constant weight.

    Identical plumbing to the self-adapting path with the data-driven
    weight replaced by w_tilde; w_tilde = 0 reduces to np_posterior and
    w_tilde = 1 to the informative-only analysis.
    """
    prior = build_sam_prior(informative, vague, w_tilde)
    return mixture_update(prior, data, sampling_var=_sampling_var(prior.family, sigma_hat))


def _discounted_component(
    base: BetaComponent | NormalComponent,
    historical: BinarySummary | NormalSummary,
    gamma: float,
    sigma_hat: float | None,
) -> BetaComponent | NormalComponent:
    # Conjugate update of the vague component by historical data whose
    # likelihood is raised to the power gamma.
    if isinstance(base, BetaComponent):
        assert isinstance(historical, BinarySummary)
        return BetaComponent(
            base.a + gamma * historical.x,
            base.b + gamma * (historical.n - historical.x),
        )
    assert isinstance(historical, NormalSummary)
    assert sigma_hat is not None
    if gamma == 0.0 or historical.n == 0:
        return base
    scaled_n = gamma * historical.n / (sigma_hat * sigma_hat)
    prec = 1.0 / base.v + scaled_n
    mean = (base.m / base.v + scaled_n * historical.mean) / prec
    return NormalComponent(mean, 1.0 / prec)


def _power_prior_mixture(
    vague: MixtureDistribution,
    historical: BinarySummary | NormalSummary,
    gammas: Sequence[float],
    sigma_hat: float | None,
) -> MixtureDistribution:
    if len(vague.components) != 1:
        raise ValueError("power prior requires a single-component vague prior")
    base = vague.components[0][1]
    w = 1.0 / len(gammas)
    comps = tuple(
        (w, _discounted_component(base, historical, g, sigma_hat)) for g in gammas
    )
    return MixtureDistribution(vague.family, comps)


def power_prior_posterior(
    vague: MixtureDistribution,
    historical: BinarySummary | NormalSummary,
    data: BinarySummary | NormalSummary,
    grid_size: int = 101,
    sigma_hat: float | None = None,
) -> MixtureDistribution:
    """Normalized power prior posterior via a midpoint grid on the exponent.

    For each gamma on the midpoint grid of [0, 1], the conditional prior
    is the vague prior conjugately updated by the historical data with
    counts (or precision contribution) scaled by gamma. Under a uniform
    prior on gamma the marginal prior is the equally weighted grid
    mixture; the standard mixture update then reweights those
    conditionals by the marginal likelihood of the current data, which
    is exactly the posterior distribution over gamma.

    Beta: for gamma 0.125 on the grid, Beta(a, b) becomes
    Beta(a + 0.125 x_h, b + 0.125 (n_h - x_h)). Normal: precision
    1/v0 + gamma * n_h / sigma_hat^2 with the matching precision-weighted
    mean.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    gammas = [(2 * g + 1) / (2 * grid_size) for g in range(grid_size)]
    prior = _power_prior_mixture(vague, historical, gammas, sigma_hat)
    return mixture_update(prior, data, sampling_var=_sampling_var(vague.family, sigma_hat))
