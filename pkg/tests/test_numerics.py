import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cks_toolkit.core.exceptions import InvalidTolerance, NoBracket, NonDecreasingTail, NonFinite
from cks_toolkit.models.numerics import LogValue, Mode
from cks_toolkit.services.numerics import log_factorial, logsumexp_series, optimize_scalar, tail_start


def test_logvalue_zero_and_products():
    zero = LogValue.zero()
    two = LogValue.from_real(2.0)
    assert zero.is_zero
    assert (zero * two).is_zero
    assert (zero + two).to_real() == pytest.approx(2.0)
    assert (two * two).to_real() == pytest.approx(4.0)
    assert (two / two).logv == pytest.approx(0.0)


def test_logvalue_rejects_nan_and_negative():
    with pytest.raises(ValueError):
        LogValue(logv=float("nan"))
    with pytest.raises(ValueError):
        LogValue.from_real(-1.0)


def test_logvalue_to_real_saturates():
    assert LogValue(logv=1000.0).to_real() == math.inf


@given(st.integers(min_value=0, max_value=500))
def test_log_factorial_matches_lgamma(n):
    assert float(log_factorial(n)) == pytest.approx(math.lgamma(n + 1), rel=1e-12, abs=1e-12)


def test_tail_start_never_zero():
    assert tail_start(2) == 2
    assert tail_start(3) == 2
    assert tail_start(99) == 66


def test_exponential_series():
    result = logsumexp_series(lambda n: -float(log_factorial(n)))
    assert result.converged
    assert result.value == pytest.approx(math.e, rel=1e-12)
    assert result.tail_bound.logv <= result.log_sum + math.log(1e-12)


@given(st.floats(min_value=0.05, max_value=0.9))
@settings(max_examples=50)
def test_geometric_series(q):
    result = logsumexp_series(lambda n: n * math.log(q))
    assert result.converged
    assert result.value == pytest.approx(1.0 / (1.0 - q), rel=1e-9)


def test_all_zero_terms_terminate():
    result = logsumexp_series(lambda n: float("-inf"))
    assert result.converged
    assert result.sum.is_zero


def test_growing_terms_raise():
    with pytest.raises(NonDecreasingTail):
        logsumexp_series(lambda n: float(n), max_terms=50)


def test_series_budget_exhausted_on_decreasing_tail():
    result = logsumexp_series(lambda n: -0.01 * n, max_terms=20)
    assert not result.converged
    assert result.terms_used == 20


def test_bad_series_inputs():
    with pytest.raises(InvalidTolerance):
        logsumexp_series(lambda n: 0.0, tol=0.0)
    with pytest.raises(NonFinite):
        logsumexp_series(lambda n: float("nan"))


def test_optimize_known_minimum():
    res = optimize_scalar(lambda x: math.exp(x) - 2.0 * x, Mode.MIN, seed=0.0)
    assert res.arg_opt == pytest.approx(math.log(2.0), abs=1e-8)
    assert res.value_opt == pytest.approx(2.0 - 2.0 * math.log(2.0), abs=1e-12)


def test_optimize_maximum():
    res = optimize_scalar(lambda x: -(x - 3.0) ** 2 + 1.0, Mode.MAX, seed=-5.0)
    assert res.arg_opt == pytest.approx(3.0, abs=1e-8)
    assert res.value_opt == pytest.approx(1.0)


@given(st.floats(min_value=-50.0, max_value=50.0))
@settings(max_examples=50)
def test_optimize_quadratic(c):
    res = optimize_scalar(lambda x: (x - c) ** 2, Mode.MIN, seed=0.0)
    assert res.arg_opt == pytest.approx(c, abs=1e-6)
    assert res.bracket[0] <= res.arg_opt <= res.bracket[1]


def test_optimize_reports_boundary_side():
    with pytest.raises(NoBracket) as left:
        optimize_scalar(lambda x: x, Mode.MIN, seed=0.0)
    assert left.value.side == "left"
    with pytest.raises(NoBracket) as right:
        optimize_scalar(lambda x: x, Mode.MAX, seed=0.0, lo=-10.0, hi=10.0)
    assert right.value.side == "right"
    assert right.value.edge == 10.0


@pytest.mark.parametrize("seed, hi", [(-0.16, 0.25), (0.0, 0.5), (0.0, 2.0)])
def test_minimum_just_below_upper_cap(seed, hi):
    res = optimize_scalar(lambda x: (x - 0.05) ** 2, Mode.MIN, seed=seed, hi=hi)
    assert res.arg_opt == pytest.approx(0.05, abs=1e-6)


def test_minimum_just_above_lower_cap():
    res = optimize_scalar(lambda x: (x + 0.05) ** 2, Mode.MIN, seed=0.16, lo=-0.25)
    assert res.arg_opt == pytest.approx(-0.05, abs=1e-6)


def test_maximum_close_to_cap():
    res = optimize_scalar(lambda x: -((x - 9.9) ** 2), Mode.MAX, seed=0.0, lo=-10.0, hi=10.0)
    assert res.arg_opt == pytest.approx(9.9, abs=1e-6)


def test_optimize_nonfinite_objective():
    with pytest.raises(NonFinite):
        optimize_scalar(lambda x: float("nan"), Mode.MIN)


def test_optimize_invalid_tolerance():
    with pytest.raises(InvalidTolerance):
        optimize_scalar(lambda x: x * x, tol=-1.0)


def test_log_factorial_vectorized():
    values = log_factorial(np.arange(5))
    assert np.allclose(np.exp(values), [1, 1, 2, 6, 24])
