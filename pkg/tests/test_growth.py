import math

import numpy as np
import pytest

from cks_toolkit.core.exceptions import BadParam, EvalFailure, OverflowDomain
from cks_toolkit.models.growth import GridSpec, Status
from cks_toolkit.models.schemas import FunctionSpec
from cks_toolkit.services.growth import (
    CATALOG,
    check_class,
    check_u_conditions,
    dilate,
    from_spec,
    make_catalog,
)


def test_catalog_entries_build():
    assert set(CATALOG) == {"ks", "ks_dual", "exp_k", "bell_dual", "exp_scaled", "custom"}
    assert make_catalog("ks", {"beta": 0.0}).log_u(2.0) == pytest.approx(2.0)
    assert make_catalog("ks", {"beta": 0.5}).log_u(8.0) == pytest.approx(1.5 * 4.0)
    assert make_catalog("ks_dual", {"beta": 0.5}).log_u(2.0) == pytest.approx(0.5 * 4.0)
    assert make_catalog("exp_k", {"k": 1}).log_u(3.0) == pytest.approx(3.0)
    assert make_catalog("exp_k", {"k": 2}).log_u(1.0) == pytest.approx(math.e)
    assert make_catalog("exp_scaled", {"a": 2.0}).log_u(3.0) == pytest.approx(6.0)
    assert make_catalog("custom", {"expr": "exp(2*r)"}).log_u(1.0) == pytest.approx(2.0)


def test_bell_dual_closed_form():
    u = make_catalog("bell_dual", {"k": 2})
    r = math.exp(4.0)
    # log_1(sqrt r) = log max(e^2, e) = 2
    assert u.log_u(r) == pytest.approx(2.0 * math.sqrt(2.0 * r))
    assert u.log_u(0.0) == pytest.approx(0.0)


@pytest.mark.parametrize("name,params", [
    ("ks", {"beta": 1.0}),
    ("ks", {"beta": -0.1}),
    ("exp_k", {"k": 0}),
    ("exp_k", {"k": 1.5}),
    ("exp_k", {}),
    ("bell_dual", {"k": 1}),
    ("exp_scaled", {"a": 0.0}),
    ("custom", {}),
    ("nope", {}),
])
def test_catalog_rejects_bad_parameters(name, params):
    with pytest.raises(BadParam):
        make_catalog(name, params)


def test_descriptor_and_domain(ks0):
    assert ks0.descriptor == "ks(beta=0)"
    exp2 = make_catalog("exp_k", {"k": 2})
    assert exp2.domain_max == pytest.approx(700.0)
    with pytest.raises(OverflowDomain):
        exp2.log_u(800.0)
    with pytest.raises(ValueError):
        ks0.log_u(-1.0)


def test_nonfinite_evaluation():
    u = make_catalog("custom", {"expr": "exp(sqrt(r - 1))"})
    with pytest.raises(EvalFailure):
        u.log_u(0.5)


def test_dilate(ks0):
    v = dilate(ks0, 2.0)
    assert v.log_u(3.0) == pytest.approx(6.0)
    assert v.params["dilation"] == 2.0
    assert dilate(ks0, 1.0) is ks0
    with pytest.raises(BadParam):
        dilate(ks0, 0.0)


def test_dilate_carries_closed_form_dual(ks0):
    v = dilate(ks0, 2.0)
    # (u(c .))* (r) = u*(r / c)
    assert v.dual_log_eval(4.0) == pytest.approx(2.0)


def test_convexity_classes():
    root = make_catalog("custom", {"expr": "exp(sqrt(r))"})
    assert check_class(root, "log_x2_convex").status == Status.PASS
    failed = check_class(root, "log_x1_convex")
    assert failed.status == Status.FAIL
    assert failed.witness is not None
    assert check_class(make_catalog("exp_scaled", {"a": 1.0}), "log_exp_convex").status == Status.PASS


def test_limit_classes(ks0):
    assert check_class(ks0, "C_plus_log").status == Status.PASS
    assert check_class(ks0, "C_plus_half").status == Status.PASS
    slow = make_catalog("custom", {"expr": "1 + r"})
    assert check_class(slow, "C_plus_log").status == Status.INCONCLUSIVE


def test_unknown_class(ks0):
    with pytest.raises(BadParam):
        check_class(ks0, "log_banana_convex")


def test_u_conditions_for_exponential(ks0):
    evidence = {e.cls: e for e in check_u_conditions(ks0)}
    assert [e for e in evidence] == ["U0", "U1", "U2", "U3"]
    assert all(e.status == Status.PASS for e in evidence.values())


def test_u_conditions_detect_offset():
    u = make_catalog("custom", {"expr": "exp(r + log(2))"})
    evidence = {e.cls: e for e in check_u_conditions(u)}
    assert evidence["U0"].status == Status.FAIL
    assert evidence["U0"].margin == pytest.approx(math.log(2.0))
    assert evidence["U1"].status == Status.FAIL


def test_u2_detects_superlinear_growth():
    u = make_catalog("custom", {"expr": "exp(r^2)"})
    evidence = {e.cls: e for e in check_u_conditions(u, GridSpec(r_min=1e-3, r_max=100.0, points=30))}
    assert evidence["U2"].status == Status.FAIL


def test_from_spec():
    assert from_spec(FunctionSpec(name="exp_scaled", a=3.0)).log_u(1.0) == pytest.approx(3.0)
    assert from_spec(FunctionSpec(expr="exp(r/2)")).log_u(4.0) == pytest.approx(2.0)


def test_grid_spec_validation():
    with pytest.raises(ValueError):
        GridSpec(r_min=0.0)
    grid = GridSpec(r_min=1.0, r_max=4.0, points=3, include_zero=True)
    assert np.allclose(grid.values(), [0.0, 1.0, 2.0, 4.0])
