import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cks_toolkit.core.exceptions import BadParam, TooShort
from cks_toolkit.models.conditions import CONDITION_NAMES, Verdict
from cks_toolkit.models.growth import Status
from cks_toolkit.services.conditions import check_condition, check_lattice
from cks_toolkit.services.sequences import user_sequence


@pytest.fixture
def decaying():
    """alpha(n) = e^(-n)."""
    return user_sequence(-np.arange(21, dtype=float), descriptor="decaying")


def test_constant_weight(ones):
    for name in ("A1", "A2", "A2_tilde", "B2", "B2_tilde", "B3"):
        assert check_condition(name, ones).status == Status.PASS, name
    assert check_condition("A1", ones).constant == pytest.approx(1.0)
    assert check_condition("C1", ones).constant == pytest.approx(1.0)


def test_a1_needs_unit_start():
    shifted = user_sequence([1.0] + [0.0] * 20)
    verdict = check_condition("A1", shifted)
    assert verdict.status == Status.FAIL
    assert verdict.witness == (0, 0)


def test_a1_rate_and_assertion(decaying):
    verdict = check_condition("A1", decaying)
    assert verdict.status == Status.PASS
    assert verdict.constant == pytest.approx(math.e)
    assert check_condition("A1", decaying, candidate=math.e).status == Status.PASS
    too_small = check_condition("A1", decaying, candidate=1.0)
    assert too_small.status == Status.FAIL
    assert too_small.witness is not None


def test_growing_root_fails_a2(factorial_squared):
    verdict = check_condition("A2", factorial_squared)
    assert verdict.status == Status.FAIL
    assert verdict.witness == (14, 20)


def test_log_convex_weight(factorial_squared):
    assert check_condition("B3", factorial_squared).status == Status.PASS
    assert check_condition("B2_tilde", factorial_squared).status == Status.PASS
    b2 = check_condition("B2", factorial_squared)
    assert b2.status == Status.FAIL
    assert b2.witness == (0, 2)


def test_b1_never_fails(factorial_squared, ones):
    # an empty certified radius leaves B1 unsettled
    assert check_condition("B1", factorial_squared).status == Status.INCONCLUSIVE
    assert check_condition("B1", ones).status in (Status.PASS, Status.INCONCLUSIVE)


def test_c_constants(decaying):
    # alpha(n) <= C^m alpha(m) for n <= m
    c1 = check_condition("C1", decaying)
    assert c1.status == Status.PASS
    assert c1.constant == pytest.approx(math.e)
    # alpha(n + m) = alpha(n) alpha(m)
    assert check_condition("C2", decaying).constant == pytest.approx(1.0)
    assert check_condition("C3", decaying).constant == pytest.approx(1.0)


def test_c2_assertion_reports_pair(factorial_squared):
    verdict = check_condition("C2", factorial_squared, candidate=1.0)
    assert verdict.status == Status.FAIL
    n, m = verdict.witness
    assert n + m <= 20


def test_near_b2_falls_back_to_majorant(ones):
    verdict = check_condition("B2_near", ones)
    assert verdict.status == Status.PASS


@pytest.mark.slow
def test_near_b2_route_through_source(ks0):
    from cks_toolkit.services.sequences import alpha_from_growth

    verdict = check_condition("B2_near", alpha_from_growth(ks0, 20))
    assert verdict.status == Status.PASS


def test_argument_errors(ones):
    with pytest.raises(BadParam):
        check_condition("D4", ones)
    with pytest.raises(BadParam):
        check_condition("B2", ones, candidate=2.0)
    with pytest.raises(BadParam):
        check_condition("A1", ones, candidate=-1.0)
    with pytest.raises(TooShort):
        check_condition("A1", user_sequence([0.0] * 5))


def test_all_conditions_return_verdicts(ones):
    for name in CONDITION_NAMES:
        assert isinstance(check_condition(name, ones), Verdict)


def test_lattice_flags_broken_implications():
    entries = {
        "A1": Verdict(status=Status.PASS),
        "A2_tilde": Verdict(status=Status.FAIL),
        "B3": Verdict(status=Status.FAIL),
        "B2_tilde": Verdict(status=Status.FAIL),
        "C3": Verdict(status=Status.INCONCLUSIVE),
        "C1": Verdict(status=Status.FAIL),
    }
    assert check_lattice(entries) == ["InternalInconsistency: A1 PASS but A2_tilde FAIL"]
    assert check_lattice({}) == []


def test_a1_pass_is_prefix_evidence():
    # flat up to n = 20, then alpha(n) = e^(-n^2): the prefix cannot see the decay
    n = np.arange(41, dtype=float)
    log_alpha = np.where(n <= 20, 0.0, -(n ** 2))
    assert check_condition("A1", user_sequence(log_alpha[:21])).status == Status.PASS
    assert check_condition("A1", user_sequence(log_alpha)).status == Status.INCONCLUSIVE


@pytest.mark.slow
@given(st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=20, max_size=20))
@settings(max_examples=100, deadline=None)
def test_random_walks_respect_implications(steps):
    alpha = user_sequence(np.concatenate([[0.0], np.cumsum(steps)]), descriptor="walk")
    entries = {name: check_condition(name, alpha) for name in CONDITION_NAMES}
    assert check_lattice(entries) == []
