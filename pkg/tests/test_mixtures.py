"""Mixture primitives checked against high-precision references.

The frozen constants below were generated with mpmath at 60 significant
digits: ``mp.log(mp.beta(a, b))`` for the log-beta table and the exact
conjugate marginal ratios for the beta-binomial cases.
"""

import json
import math

import numpy as np
import pytest

from sam_prior import (
    BetaComponent,
    BinarySummary,
    NormalComponent,
    NormalSummary,
    beta_log_marginal,
    beta_mixture,
    log_beta_function,
    mixture_cdf,
    mixture_from_dict,
    mixture_mean,
    mixture_quantile,
    mixture_to_dict,
    mixture_update,
    normal_log_marginal,
    normal_mixture,
)

LOG_BETA_REFERENCE = [
    (42.5, 77.2, -78.601350534949792331),
    (1.0, 1.0, 0.0),
    (0.5, 0.5, 1.1447298858494001741),
    (3.0, 4.0, -4.0943445622221006848),
    (29.0, 31.0, -41.985849375437791134),
    (30.0, 30.0, -42.019750927113472482),
    (121.0, 181.0, -204.55245914716436971),
    (1e6, 0.5, -6.335390211057436965),
    (1e6, 1e6, -1386300.0033629211163),
    (2500.0, 7.25, -49.681202482652521241),
]


def test_log_beta_reference_values():
    for a, b, expected in LOG_BETA_REFERENCE:
        got = log_beta_function(a, b)
        assert math.isclose(got, expected, rel_tol=1e-12, abs_tol=1e-15), (a, b, got)


def test_log_beta_symmetry():
    rng = np.random.default_rng(2101)
    for _ in range(200):
        a = float(10 ** rng.uniform(-2, 6))
        b = float(10 ** rng.uniform(-2, 6))
        assert log_beta_function(a, b) == log_beta_function(b, a)


def test_log_beta_recurrence():
    # B(a+1, b) = B(a, b) * a / (a + b)
    rng = np.random.default_rng(2102)
    for _ in range(300):
        a = float(10 ** rng.uniform(-1, 4))
        b = float(10 ** rng.uniform(-1, 4))
        lhs = log_beta_function(a + 1.0, b)
        rhs = log_beta_function(a, b) + math.log(a / (a + b))
        assert math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-9)


def test_beta_log_marginal_reference_values():
    got = beta_log_marginal(BetaComponent(121, 181), BinarySummary(x=60, n=150))
    assert math.isclose(got, -101.15366778057077304, rel_tol=1e-12)
    got = beta_log_marginal(BetaComponent(42.5, 77.2), BinarySummary(x=12, n=35))
    assert math.isclose(got, -22.637794826109517578, rel_tol=1e-12)


def test_beta_log_marginal_empty_data():
    assert beta_log_marginal(BetaComponent(2, 3), BinarySummary(x=0, n=0)) == 0.0


def test_beta_log_marginal_chains_over_splits():
    # Observing (x1, n1) then (x2, n2) must carry the same total evidence
    # as observing the pooled data once.
    rng = np.random.default_rng(2103)
    for _ in range(100):
        a = float(rng.uniform(0.5, 50))
        b = float(rng.uniform(0.5, 50))
        n1, n2 = int(rng.integers(1, 40)), int(rng.integers(1, 40))
        x1 = int(rng.integers(0, n1 + 1))
        x2 = int(rng.integers(0, n2 + 1))
        whole = beta_log_marginal(BetaComponent(a, b), BinarySummary(x1 + x2, n1 + n2))
        first = beta_log_marginal(BetaComponent(a, b), BinarySummary(x1, n1))
        second = beta_log_marginal(
            BetaComponent(a + x1, b + n1 - x1), BinarySummary(x2, n2)
        )
        assert math.isclose(whole, first + second, rel_tol=1e-11, abs_tol=1e-11)


def test_normal_log_marginal_reference_value():
    got = normal_log_marginal(
        NormalComponent(0.3, 0.04), NormalSummary(n=20, mean=0.5, sd=1.0), 1.2**2
    )
    assert math.isclose(got, -0.0028817579325800585691, rel_tol=1e-12)


def test_normal_log_marginal_empty_data():
    assert normal_log_marginal(NormalComponent(0, 1), NormalSummary(n=0, mean=0.0), 4.0) == 0.0


def test_normal_log_marginal_translation_invariant():
    rng = np.random.default_rng(2104)
    for _ in range(100):
        m = float(rng.normal(0, 2))
        v = float(rng.uniform(0.1, 5))
        ybar = float(rng.normal(0, 2))
        shift = float(rng.normal(0, 10))
        base = normal_log_marginal(
            NormalComponent(m, v), NormalSummary(n=7, mean=ybar, sd=1.0), 2.0
        )
        moved = normal_log_marginal(
            NormalComponent(m + shift, v), NormalSummary(n=7, mean=ybar + shift, sd=1.0), 2.0
        )
        assert math.isclose(base, moved, rel_tol=1e-9, abs_tol=1e-12)


def test_single_component_beta_update_is_conjugate():
    post = mixture_update(beta_mixture([(1.0, 1.0, 1.0)]), BinarySummary(x=2, n=2))
    ((w, comp),) = post.components
    assert w == 1.0
    assert (comp.a, comp.b) == (3.0, 1.0)


def test_single_component_normal_update_is_conjugate():
    prior = normal_mixture([(1.0, 0.5, 2.0)])
    post = mixture_update(prior, NormalSummary(n=9, mean=1.2, sd=1.0), sampling_var=4.0)
    ((w, comp),) = post.components
    prec = 1 / 2.0 + 9 / 4.0
    assert w == 1.0
    assert math.isclose(comp.m, (0.5 / 2.0 + 9 * 1.2 / 4.0) / prec, rel_tol=1e-14)
    assert math.isclose(comp.v, 1 / prec, rel_tol=1e-14)


def test_mixture_update_chains_over_splits():
    rng = np.random.default_rng(2105)
    for _ in range(60):
        prior = beta_mixture(
            [
                (0.3, float(rng.uniform(0.5, 30)), float(rng.uniform(0.5, 30))),
                (0.7, float(rng.uniform(0.5, 30)), float(rng.uniform(0.5, 30))),
            ]
        )
        n1, n2 = int(rng.integers(1, 30)), int(rng.integers(1, 30))
        x1 = int(rng.integers(0, n1 + 1))
        x2 = int(rng.integers(0, n2 + 1))
        pooled = mixture_update(prior, BinarySummary(x1 + x2, n1 + n2))
        stepwise = mixture_update(mixture_update(prior, BinarySummary(x1, n1)), BinarySummary(x2, n2))
        for (wa, ca), (wb, cb) in zip(pooled.components, stepwise.components):
            assert math.isclose(wa, wb, rel_tol=1e-11, abs_tol=1e-13)
            assert math.isclose(ca.a, cb.a, rel_tol=1e-12)
            assert math.isclose(ca.b, cb.b, rel_tol=1e-12)


def test_mixture_update_weights_match_direct_formula():
    prior = beta_mixture([(0.2, 3, 7), (0.5, 10, 2), (0.3, 1, 1)])
    data = BinarySummary(x=11, n=25)
    post = mixture_update(prior, data)
    raw = [w * math.exp(beta_log_marginal(c, data)) for w, c in prior.components]
    total = sum(raw)
    for (w_post, _), r in zip(post.components, raw):
        assert math.isclose(w_post, r / total, rel_tol=1e-12)
    assert math.isclose(sum(w for w, _ in post.components), 1.0, rel_tol=1e-12)


def test_mixture_mean_matches_component_average():
    d = beta_mixture([(0.25, 2, 8), (0.75, 6, 2)])
    expected = 0.25 * (2 / 10) + 0.75 * (6 / 8)
    assert math.isclose(mixture_mean(d), expected, rel_tol=1e-14)
    d = normal_mixture([(0.4, -1.0, 2.0), (0.6, 3.0, 0.5)])
    assert math.isclose(mixture_mean(d), 0.4 * -1.0 + 0.6 * 3.0, rel_tol=1e-14)


def test_cdf_monotone_and_quantile_round_trip():
    rng = np.random.default_rng(2106)
    for family in ("beta", "normal"):
        for _ in range(20):
            if family == "beta":
                d = beta_mixture(
                    [
                        (0.5, float(rng.uniform(0.5, 20)), float(rng.uniform(0.5, 20))),
                        (0.5, float(rng.uniform(0.5, 20)), float(rng.uniform(0.5, 20))),
                    ]
                )
                grid = np.linspace(0.01, 0.99, 25)
            else:
                d = normal_mixture(
                    [
                        (0.5, float(rng.normal(0, 3)), float(rng.uniform(0.2, 4))),
                        (0.5, float(rng.normal(0, 3)), float(rng.uniform(0.2, 4))),
                    ]
                )
                grid = np.linspace(-8, 8, 25)
            values = [mixture_cdf(d, float(t)) for t in grid]
            assert all(u <= v + 1e-12 for u, v in zip(values, values[1:]))
            for p in (0.05, 0.31, 0.5, 0.77, 0.95):
                q = mixture_quantile(d, p)
                assert math.isclose(mixture_cdf(d, q), p, rel_tol=0, abs_tol=1e-7)


def test_symmetric_normal_mixture_centers_at_half():
    d = normal_mixture([(0.5, -2.0, 1.5), (0.5, 2.0, 1.5)])
    assert math.isclose(mixture_cdf(d, 0.0), 0.5, abs_tol=1e-12)
    assert math.isclose(mixture_quantile(d, 0.5), 0.0, abs_tol=1e-9)


def test_serialization_round_trip_is_exact():
    d = beta_mixture([(1 / 3, 42.5, 77.2), (2 / 3, 7.2, 12.4)])
    back = mixture_from_dict(json.loads(json.dumps(mixture_to_dict(d))))
    assert back.family == d.family
    for (wa, ca), (wb, cb) in zip(d.components, back.components):
        assert wa == wb and ca.a == cb.a and ca.b == cb.b

    d = normal_mixture([(0.123456789012345, -1.5, 9.0), (0.876543210987655, 0.25, 0.04)])
    back = mixture_from_dict(json.loads(json.dumps(mixture_to_dict(d))))
    for (wa, ca), (wb, cb) in zip(d.components, back.components):
        assert wa == wb and ca.m == cb.m and ca.v == cb.v


def test_invalid_mixtures_are_rejected():
    with pytest.raises(ValueError):
        beta_mixture([(0.5, 2, 3), (0.4, 1, 1)])  # weights must sum to one
    with pytest.raises(ValueError):
        beta_mixture([(1.0, -1, 2)])
    with pytest.raises(ValueError):
        normal_mixture([(1.0, 0.0, 0.0)])  # zero variance
    with pytest.raises(ValueError):
        mixture_from_dict({"family": "gamma", "components": []})
