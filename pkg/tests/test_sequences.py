import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cks_toolkit.core.exceptions import BadParam, DivergentProfile, LengthMismatch, TooShort
from cks_toolkit.models.growth import Status
from cks_toolkit.models.sequences import ProvenanceKind, Shape, Which
from cks_toolkit.services.growth import make_catalog
from cks_toolkit.services.legendre import l_function_at, l_sharp_at, legendre_table
from cks_toolkit.services.sequences import (
    alpha_from_growth,
    bell_numbers,
    concave_majorant,
    egf_eval,
    ks_power_sequence,
    log_shape,
    sequences_equivalent,
    stirling_sandwich,
    user_sequence,
    wick_norm,
)


def test_alpha_from_exponential(ks0):
    alpha = alpha_from_growth(ks0, 10)
    assert np.exp(alpha.log_alpha[:3]) == pytest.approx([1.0, 1.0 / math.e, 2.0 / math.e ** 2], rel=1e-9)
    assert alpha.provenance.kind == ProvenanceKind.GROWTH
    assert alpha.source is ks0
    assert alpha.subject == "ks(beta=0)"
    # gamma(n) = alpha(n) / n!
    assert alpha.log_gamma[2] == pytest.approx(alpha.log_alpha[2] - math.log(2.0))


def test_user_sequence_validation():
    with pytest.raises(TooShort):
        user_sequence([])
    with pytest.raises(ValueError):
        user_sequence([0.0, float("nan")])


def test_bell_order_two_is_exact():
    bell = bell_numbers(2, 10)
    assert bell.exact[:6] == [1, 1, 2, 5, 15, 52]
    assert bell.exact[10] == 115975
    assert bell.provenance.kind == ProvenanceKind.BELL
    assert not bell.precision_loss


def test_bell_order_one_is_constant():
    assert bell_numbers(1, 5).log_alpha == [0.0] * 6


def test_bell_order_three():
    bell = bell_numbers(3, 4)
    values = np.exp(bell.log_alpha)
    assert values[0] == pytest.approx(1.0)
    assert values[1] == pytest.approx(math.e, rel=1e-12)
    assert values[2] == pytest.approx(2 * math.e + math.e ** 2, rel=1e-12)
    assert bell.error_estimate > 0


@pytest.mark.parametrize("k,N", [(0, 5), (2.5, 5), (2, 201), (2, -1)])
def test_bell_rejects_bad_arguments(k, N):
    with pytest.raises(BadParam):
        bell_numbers(k, N)


def test_egf_of_constant_weight(ones):
    result = egf_eval(ones, Which.ALPHA, 1.0)
    assert result.converged
    assert result.value == pytest.approx(math.e, rel=1e-10)
    assert egf_eval(ones, Which.INV_ALPHA, 0.0).value == pytest.approx(1.0)


def test_wick_norm(ones):
    assert wick_norm(ones, Which.ALPHA, 2.0).logv == pytest.approx(1.0, rel=1e-10)
    assert wick_norm(ones, Which.ALPHA, 1.0, a=2.0).logv == pytest.approx(1.0, rel=1e-10)


def test_egf_rejects_growing_coefficients(factorial_squared):
    with pytest.raises(DivergentProfile):
        egf_eval(factorial_squared, Which.ALPHA, 0.5)


def test_log_shape_verdicts():
    n = np.arange(10, dtype=float)
    assert log_shape(-n ** 2, Shape.LOG_CONCAVE).status == Status.PASS
    assert log_shape(n ** 2, Shape.LOG_CONVEX).status == Status.PASS
    failed = log_shape([0.0, 0.0, 5.0, 0.0], Shape.LOG_CONCAVE)
    assert failed.status == Status.FAIL
    assert failed.witness == (0, 2)
    with pytest.raises(TooShort):
        log_shape([0.0, 1.0], Shape.LOG_CONCAVE)


@given(st.floats(min_value=0.01, max_value=10.0), st.integers(min_value=3, max_value=30))
def test_quadratic_logs_are_concave(c, length):
    n = np.arange(length, dtype=float)
    assert log_shape(-c * n ** 2 + 3.0 * n, Shape.LOG_CONCAVE).status == Status.PASS


@given(st.lists(st.floats(min_value=-100.0, max_value=100.0), min_size=1, max_size=40))
def test_concave_majorant_dominates_and_is_concave(values):
    y = np.asarray(values)
    hull = concave_majorant(y)
    assert np.all(hull >= y - 1e-9)
    if len(y) >= 3:
        second = hull[:-2] + hull[2:] - 2.0 * hull[1:-1]
        assert np.all(second <= 1e-9)


@given(st.floats(min_value=0.1, max_value=10.0), st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=50)
def test_scaled_sequences_are_equivalent(K, c):
    a = ks_power_sequence(0.5, 20)
    b = user_sequence(a.as_array() + math.log(K) + np.arange(21) * math.log(c))
    result = sequences_equivalent(a, b)
    assert result.holds
    assert result.K1 == pytest.approx(K, rel=1e-9)
    assert result.c1 == pytest.approx(c, rel=1e-6)
    assert result.c2 == pytest.approx(c, rel=1e-6)


def test_superexponential_gap_is_not_equivalent():
    a = ks_power_sequence(0.0, 30)
    b = ks_power_sequence(1.0, 30)
    result = sequences_equivalent(a, b)
    assert not result.holds
    assert result.window == (20, 30)


def test_equivalence_length_mismatch():
    with pytest.raises(LengthMismatch):
        sequences_equivalent(ks_power_sequence(0.5, 10), ks_power_sequence(0.5, 11))


def test_power_sequence_range():
    with pytest.raises(BadParam):
        ks_power_sequence(1.5, 10)


def test_stirling_sandwich():
    report = stirling_sandwich()
    assert report.holds
    assert report.lower_margin <= 0.0
    assert report.upper_margin <= 0.0
    with pytest.raises(BadParam):
        stirling_sandwich(0)


def test_equivalence_is_decided_by_spread():
    a = ks_power_sequence(0.0, 30)
    n = np.arange(31)
    d = np.sqrt(n)
    b = user_sequence(a.as_array() + d)
    loose = sequences_equivalent(a, b, spread_cap=0.05)
    tight = sequences_equivalent(a, b, spread_cap=0.03)
    assert loose.holds
    assert not tight.holds
    assert loose.spread == pytest.approx(1 / math.sqrt(20) - 1 / math.sqrt(30))
    # the fitted constants bound log b - log a on the prefix either way
    for result in (loose, tight):
        assert np.all(math.log(result.K1) + n * math.log(result.c1) <= d + 1e-9)
        assert np.all(d <= math.log(result.K2) + n * math.log(result.c2) + 1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("beta", [0.0, 0.25, 0.5, 0.75])
def test_generating_functions_are_the_l_series(beta):
    u = make_catalog("ks", {"beta": beta})
    table = legendre_table(u, 60)
    alpha = alpha_from_growth(u, 60)
    for r in (0.1, 0.5, 1.0, 1.5, 2.0):
        assert egf_eval(alpha, Which.INV_ALPHA, r).value == pytest.approx(l_function_at(table, r).value, rel=1e-10)
        assert egf_eval(alpha, Which.ALPHA, r).value == pytest.approx(l_sharp_at(table, r).value, rel=1e-10)
