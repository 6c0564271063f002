"""Adaptive mixture weight: exact small cases, limits, and symmetries."""

import math

import numpy as np
import pytest

from sam_prior import (
    BinarySummary,
    NormalSummary,
    beta_mixture,
    build_sam_prior,
    estimate_theta_h,
    mixture_mean,
    mixture_update,
    sam_posterior,
    sam_weight_binary,
    sam_weight_normal,
)

MAP_PRIOR = beta_mixture([(0.63, 42.5, 77.2), (0.37, 7.2, 12.4)])
FLAT = beta_mixture([(1.0, 1.0, 1.0)])


def test_binary_weight_two_successes_out_of_two():
    # theta_hat = 0.5, delta = 0.25, x = n = 2:
    # R = 0.5^2 / 0.75^2 = 4/9, so w = 4/13.
    got = sam_weight_binary(0.5, 0.25, BinarySummary(x=2, n=2))
    assert math.isclose(got.w, 4 / 13, rel_tol=1e-12)
    assert math.isclose(got.log_r, math.log(4 / 9), rel_tol=1e-12)
    assert got.side_used == "plus"


def test_normal_weight_closed_form_at_center():
    # ybar = theta_hat makes log R = n * delta^2 / (2 sigma^2) = 2 here.
    got = sam_weight_normal(0.0, 1.0, 1.0, NormalSummary(n=4, mean=0.0, sd=1.0))
    assert math.isclose(got.log_r, 2.0, rel_tol=1e-14)
    assert math.isclose(got.w, math.exp(2) / (1 + math.exp(2)), rel_tol=1e-14)


def test_normal_weight_is_half_at_half_delta_gap():
    # With theta_hat at zero the half-delta gap is exactly representable,
    # so log R must vanish to the last bit.
    rng = np.random.default_rng(3101)
    for _ in range(50):
        delta = float(rng.uniform(0.05, 2))
        sigma = float(rng.uniform(0.3, 4))
        n = int(rng.integers(2, 400))
        for sign in (1, -1):
            data = NormalSummary(n=n, mean=sign * delta / 2, sd=sigma)
            got = sam_weight_normal(0.0, delta, sigma, data)
            assert abs(got.log_r) < 1e-12
            assert math.isclose(got.w, 0.5, abs_tol=1e-13)
    # Away from zero the identity holds up to input rounding.
    for _ in range(50):
        theta_h = float(rng.normal(0, 2))
        delta = float(rng.uniform(0.05, 2))
        data = NormalSummary(n=100, mean=theta_h + delta / 2, sd=1.0)
        got = sam_weight_normal(theta_h, delta, 1.0, data)
        assert abs(got.log_r) < 1e-9


def test_normal_weight_symmetric_in_conflict_sign():
    for gap in (0.1, 0.4, 0.9, 2.5):
        up = sam_weight_normal(1.0, 0.8, 2.0, NormalSummary(n=50, mean=1.0 + gap, sd=2.0))
        down = sam_weight_normal(1.0, 0.8, 2.0, NormalSummary(n=50, mean=1.0 - gap, sd=2.0))
        assert math.isclose(up.w, down.w, rel_tol=1e-12)
        assert up.side_used == "plus"
        assert down.side_used == "minus"


def test_binary_weight_congruence_limits():
    # Data at theta_hat push the weight to one as n grows; data at
    # theta_hat + delta push it to zero.
    theta_h, delta = 0.4, 0.1
    congruent = [
        sam_weight_binary(theta_h, delta, BinarySummary(x=int(0.4 * n), n=n)).w
        for n in (100, 1000, 10_000)
    ]
    assert congruent[0] < congruent[1] < congruent[2]
    assert congruent[-1] > 0.99
    conflicted = [
        sam_weight_binary(theta_h, delta, BinarySummary(x=int(0.5 * n), n=n)).w
        for n in (100, 1000, 10_000)
    ]
    assert conflicted[0] > conflicted[1] > conflicted[2]
    assert conflicted[-1] < 0.01


def test_normal_weight_congruence_limits():
    theta_h, delta, sigma = 0.0, 0.5, 2.0
    ws = [
        sam_weight_normal(theta_h, delta, sigma, NormalSummary(n=n, mean=0.0, sd=sigma)).w
        for n in (10, 100, 1000)
    ]
    assert ws[0] < ws[1] < ws[2] and ws[-1] > 0.99
    ws = [
        sam_weight_normal(theta_h, delta, sigma, NormalSummary(n=n, mean=delta, sd=sigma)).w
        for n in (10, 100, 1000)
    ]
    assert ws[0] > ws[1] > ws[2] and ws[-1] < 0.01


def test_binary_weight_uses_only_feasible_shift():
    # theta_hat - delta < 0 here, so the plus side is the only candidate
    # regardless of which direction the data lean.
    low = sam_weight_binary(0.05, 0.1, BinarySummary(x=0, n=20))
    assert low.side_used == "plus"
    high = sam_weight_binary(0.05, 0.1, BinarySummary(x=5, n=20))
    assert high.side_used == "plus"


def test_binary_weight_rejects_infeasible_delta():
    with pytest.raises(ValueError):
        sam_weight_binary(0.5, 0.6, BinarySummary(x=2, n=4))


def test_binary_weight_empty_data_is_neutral():
    got = sam_weight_binary(0.5, 0.25, BinarySummary(x=0, n=0))
    assert got.w == 0.5 and got.log_r == 0.0


def test_estimate_theta_h_of_map_mixture():
    assert math.isclose(estimate_theta_h(MAP_PRIOR), 0.3596, abs_tol=1e-4)


def test_build_sam_prior_weights():
    built = build_sam_prior(MAP_PRIOR, FLAT, 0.6)
    weights = [w for w, _ in built.components]
    assert weights == pytest.approx([0.378, 0.222, 0.4], rel=1e-12)
    # informative components come first and keep their parameters
    assert built.components[0][1].a == 42.5
    assert built.components[2][1].a == 1.0


def test_build_sam_prior_degenerate_weights():
    assert build_sam_prior(MAP_PRIOR, FLAT, 1.0).components == MAP_PRIOR.components
    assert build_sam_prior(MAP_PRIOR, FLAT, 0.0).components == FLAT.components


def test_sam_posterior_composes_weight_and_update():
    data = BinarySummary(x=12, n=35)
    post, weight = sam_posterior(MAP_PRIOR, FLAT, 0.2, data)
    direct = mixture_update(build_sam_prior(MAP_PRIOR, FLAT, weight.w), data)
    for (wa, ca), (wb, cb) in zip(post.components, direct.components):
        assert math.isclose(wa, wb, rel_tol=1e-12)
        assert (ca.a, ca.b) == (cb.a, cb.b)
    assert weight.theta_h_hat == estimate_theta_h(MAP_PRIOR)


def test_sam_posterior_mean_shrinks_toward_history_when_congruent():
    # Control data right at the prior mean: borrowing should pull the
    # posterior mean between the flat-prior answer and theta_h_hat.
    data = BinarySummary(x=13, n=35)  # 0.371, close to 0.36
    post, weight = sam_posterior(MAP_PRIOR, FLAT, 0.2, data)
    flat_mean = mixture_mean(mixture_update(FLAT, data))
    theta_h_hat = estimate_theta_h(MAP_PRIOR)
    assert weight.w > 0.5
    got = mixture_mean(post)
    lo, hi = sorted((flat_mean, theta_h_hat))
    assert lo <= got <= hi
