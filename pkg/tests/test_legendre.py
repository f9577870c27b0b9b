import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cks_toolkit.core.exceptions import AbortAt, BadParam, DivergentProfile, NoBracket
from cks_toolkit.models.growth import GridSpec, Status
from cks_toolkit.services.growth import make_catalog
from cks_toolkit.services.legendre import (
    dual_function,
    dual_legendre_at,
    l_function,
    l_function_at,
    l_sharp_at,
    legendre_at,
    legendre_table,
    reconstruct_at,
    verify_legendre_identities,
    verify_lfunction_bounds,
)


def test_exponential_table(ks0):
    table = legendre_table(ks0, 4)
    assert np.allclose(np.exp(table.log_ell), [1.0, math.e, (math.e / 2) ** 2, (math.e / 3) ** 3, (math.e / 4) ** 4])
    assert np.allclose(table.argmin, [0.0, 1.0, 2.0, 3.0, 4.0], atol=1e-6)
    assert table.certified_convex
    assert table.ell(1).to_real() == pytest.approx(math.e)


def test_table_needs_depth(ks0):
    with pytest.raises(BadParam):
        legendre_table(ks0, 1)


def test_power_family_closed_form(ks_half):
    assert legendre_at(ks_half, 3.0).to_real() == pytest.approx(math.exp(1.5 * 3 * (1 - math.log(3))), rel=1e-9)


def test_scaled_exponential():
    u = make_catalog("exp_scaled", {"a": 2.0})
    assert legendre_at(u, 3.0).to_real() == pytest.approx((2 * math.e / 3) ** 3, rel=1e-9)


@given(st.floats(min_value=0.5, max_value=50.0), st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=40, deadline=None)
def test_scaled_exponential_any_order(t, a):
    u = make_catalog("exp_scaled", {"a": a})
    assert legendre_at(u, t).logv == pytest.approx(t - t * math.log(t / a), abs=1e-7)


def test_order_zero_is_infimum(ks0):
    assert legendre_at(ks0, 0.0).logv == pytest.approx(0.0)
    dip = make_catalog("custom", {"expr": "1 + (r - 2)^2"})
    assert legendre_at(dip, 0.0).logv == pytest.approx(0.0, abs=1e-9)


def test_negative_order_rejected(ks0):
    with pytest.raises(BadParam):
        legendre_at(ks0, -1.0)


def test_polynomial_growth_is_not_dominating():
    u = make_catalog("custom", {"expr": "exp(2*log(1 + r))"})
    with pytest.raises(NoBracket) as err:
        legendre_at(u, 3.0)
    assert err.value.side == "right"
    with pytest.raises(AbortAt) as aborted:
        legendre_table(u, 5)
    # l_u(2) = 1 is approached only as r -> inf
    assert aborted.value.index in (2, 3)
    assert aborted.value.partial.N == aborted.value.index - 1


def test_dual_transform(ks0, ks_half):
    assert dual_legendre_at(ks0, 1.0).to_real() == pytest.approx(math.e, rel=1e-9)
    assert dual_legendre_at(ks_half, 2.0).logv == pytest.approx(2.0, rel=1e-9)
    assert dual_legendre_at(ks0, 0.0).logv == pytest.approx(0.0)
    with pytest.raises(BadParam):
        dual_legendre_at(ks0, -1.0)


def test_dual_function_closed_and_numeric(ks_half):
    closed = dual_function(ks_half)
    numeric = dual_function(ks_half, prefer_closed_form=False)
    for r in (0.5, 2.0, 7.0):
        assert numeric.log_u(r) == pytest.approx(closed.log_u(r), rel=1e-8)
    assert "log_x2_convex" in closed.claimed_classes


def test_l_series(ks0):
    table = legendre_table(ks0, 100)
    assert l_function_at(table, 0.5).value == pytest.approx(2.9288, abs=1e-3)
    assert l_sharp_at(table, 1.0).value == pytest.approx(1.5504, abs=1e-3)
    assert l_function_at(table, 0.0).value == pytest.approx(1.0)
    assert l_function(table).log_u(0.5) == pytest.approx(l_function_at(table, 0.5).log_sum)


def test_l_series_bad_profile():
    u = make_catalog("custom", {"expr": "exp(r^2)"})
    table = legendre_table(u, 30)
    forged = table.model_copy(update={"log_ell": [v + n * n for n, v in enumerate(table.log_ell)]})
    with pytest.raises(DivergentProfile):
        l_function_at(forged, 1.0)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 5.0])
def test_reconstruction(ks0, r):
    table = legendre_table(ks0, 20)
    assert reconstruct_at(table, r).logv == pytest.approx(r, abs=1e-6)


def test_reconstruction_at_zero(ks0):
    table = legendre_table(ks0, 5)
    assert reconstruct_at(table, 0.0).logv == table.log_ell[0]


@pytest.mark.slow
@pytest.mark.parametrize(
    "name, params, r_max",
    [
        ("ks", {"beta": 0.0}, 1e3),
        ("ks", {"beta": 0.5}, 1e3),
        ("ks_dual", {"beta": 0.25}, 1e3),
        ("ks_dual", {"beta": 0.5}, 1e3),
        ("exp_scaled", {"a": 1.0}, 1e3),
        ("exp_scaled", {"a": 3.0}, 1e3),
        ("exp_k", {"k": 2}, 5.0),
        ("bell_dual", {"k": 2}, 1e3),
    ],
)
def test_reconstruction_across_catalog(name, params, r_max):
    u = make_catalog(name, params)
    table = legendre_table(u, 20)
    for r in np.geomspace(1e-3, r_max, 13):
        expected = u.log_u(float(r))
        assert reconstruct_at(table, float(r)).logv == pytest.approx(expected, rel=1e-12, abs=1e-6)


def test_reconstruction_widens_t_range():
    # log u = r^2 / 2 peaks at t = r^2, far past the initial t range at r = 1000
    u = make_catalog("ks_dual", {"beta": 0.5})
    table = legendre_table(u, 20)
    assert reconstruct_at(table, 1000.0).logv == pytest.approx(5e5, abs=1e-6)


@pytest.mark.slow
def test_identities_for_exponential(ks0):
    report = verify_legendre_identities(ks0, 10)
    statuses = {c.name: c.status for c in report.checks}
    assert statuses == {
        "log_concavity": Status.PASS,
        "submultiplicative": Status.PASS,
        "xk_log_convexity": Status.PASS,
        "xk_supermultiplicative": Status.PASS,
        "dual_identity": Status.PASS,
    }
    assert report.passed


def test_identities_skip_without_hypotheses(ks0):
    report = verify_legendre_identities(ks0, 6, k=0.5)
    statuses = {c.name: c.status for c in report.checks}
    assert statuses["xk_log_convexity"] == Status.SKIPPED
    assert statuses["log_concavity"] == Status.PASS


def test_identities_need_depth(ks0):
    with pytest.raises(BadParam):
        verify_legendre_identities(ks0, 3)


@pytest.mark.slow
def test_lfunction_bounds(ks0):
    report = verify_lfunction_bounds(ks0, grid=GridSpec(r_min=1e-3, r_max=2.0, points=10, include_zero=True), N=60)
    statuses = {c.name: c.status for c in report.checks}
    assert statuses["upper_bound"] == Status.PASS
    assert statuses["reverse_bound"] in (Status.PASS, Status.INCONCLUSIVE)
    assert report.constant_estimate is not None and report.constant_estimate > 0


def test_lfunction_bounds_parameters(ks0):
    with pytest.raises(BadParam):
        verify_lfunction_bounds(ks0, a=1.0)


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.0, 0.25, 0.5, 0.75])
def test_power_family_table_matches_closed_form(beta):
    table = legendre_table(make_catalog("ks", {"beta": beta}), 100)
    n = np.arange(1, 101, dtype=float)
    closed = (1.0 + beta) * n * (1.0 - np.log(n))
    assert np.max(np.abs(np.asarray(table.log_ell[1:]) - closed)) <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.5, 0.75])
def test_numeric_dual_table_pairs_with_source(beta):
    u = make_catalog("ks", {"beta": beta})
    own = legendre_table(u, 50)
    dual = legendre_table(dual_function(u, prefer_closed_form=False), 50)
    n = np.arange(1, 51, dtype=float)
    expected = 2.0 * n - np.asarray(own.log_ell[1:]) - 2.0 * n * np.log(n)
    assert np.max(np.abs(np.asarray(dual.log_ell[1:]) - expected)) <= 1e-5


_GRID_ORACLE_ENTRIES = [
    ("ks", {"beta": 0.0}),
    ("ks", {"beta": 0.25}),
    ("ks", {"beta": 0.75}),
    ("ks_dual", {"beta": 0.5}),
    ("exp_scaled", {"a": 0.5}),
    ("exp_scaled", {"a": 3.0}),
    ("exp_k", {"k": 2}),
    ("bell_dual", {"k": 2}),
]


@pytest.mark.slow
@given(st.sampled_from(_GRID_ORACLE_ENTRIES), st.floats(min_value=0.5, max_value=20.0))
@settings(max_examples=25, deadline=None)
def test_transform_matches_dense_grid(entry, t):
    name, params = entry
    u = make_catalog(name, params)
    x_hi = min(20.0, math.log(u.domain_max) - 1e-9) if math.isfinite(u.domain_max) else 20.0
    x = np.linspace(-20.0, x_hi, 1_000_000)
    oracle = float(np.min(u.log_u_many(np.exp(x)) - t * x))
    assert legendre_at(u, t).logv == pytest.approx(oracle, abs=1e-7)
