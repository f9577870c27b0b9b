import math

import numpy as np
import pytest

from cks_toolkit.core.exceptions import NonPositive, ParseError
from cks_toolkit.services.expression import parse_expression, parse_growth


def test_outer_exp_is_unwrapped():
    u = parse_growth("exp(r^2)")
    assert u.log_u(3.0) == pytest.approx(9.0)
    assert np.allclose(u.log_u_many([1.0, 2.0]), [1.0, 4.0])


def test_plain_expression_is_logged():
    u = parse_growth("1 + r^2")
    assert u.log_u(0.0) == pytest.approx(0.0)
    assert u.log_u(2.0) == pytest.approx(math.log(5.0))
    assert u.descriptor == "custom(1 + r^2)"


def test_precedence_and_grouping():
    u = parse_growth("(r + 1)^2 * 2 / 4")
    assert u.log_u(1.0) == pytest.approx(math.log(2.0))
    v = parse_growth("exp(sqrt(r) + log(1 + r))")
    assert v.log_u(4.0) == pytest.approx(2.0 + math.log(5.0))


def test_number_formats():
    assert parse_expression("1.5e1").evaluate(0.0) == pytest.approx(15.0)
    assert parse_expression(".5").evaluate(0.0) == pytest.approx(0.5)


def test_unclosed_parenthesis_points_at_opening():
    with pytest.raises(ParseError) as err:
        parse_growth("exp(r")
    assert err.value.position == 3


def test_unknown_identifier():
    with pytest.raises(ParseError) as err:
        parse_growth("2 * q")
    assert err.value.position == 4
    assert "'r'" in err.value.expected


def test_missing_operand_at_end():
    with pytest.raises(ParseError) as err:
        parse_growth("r +")
    assert err.value.position == 3


def test_bad_character():
    with pytest.raises(ParseError) as err:
        parse_growth("r $ 2")
    assert err.value.position == 2


def test_trailing_tokens_rejected():
    with pytest.raises(ParseError):
        parse_growth("r r")


def test_nonpositive_at_check_point():
    with pytest.raises(NonPositive):
        parse_growth("r - 1")
    with pytest.raises(NonPositive):
        parse_growth("r")
