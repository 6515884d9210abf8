import math
from decimal import Decimal

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cyclicclass.bounds import (
    FieldShape,
    NotOddPrime,
    class_number_upper_bound,
    minkowski_bound,
    quadratic_class_bound,
    quadratic_subfield_discriminant,
)

from oracles import oracle_class_bound, oracle_minkowski, oracle_pi, oracle_quadratic


def _close_above(reported: float, exact: Decimal, rel: float = 1e-12) -> bool:
    r = Decimal(reported)
    if exact == 0:
        return r >= 0 and r < Decimal(rel)
    return r >= exact and abs(r - exact) <= abs(exact) * Decimal(rel)


def test_oracle_pi():
    assert str(oracle_pi())[:32] == "3.141592653589793238462643383279"
    assert abs(Decimal(math.pi) - oracle_pi()) < Decimal("1e-15")


def test_minkowski_trivial_field():
    assert minkowski_bound(FieldShape(1, 0, 1)) == 1.0


def test_minkowski_exact_rational_value():
    # n = 2, r2 = 0: B = sqrt(D)/2, and 8281 = 91^2
    assert minkowski_bound(FieldShape(2, 0, 8281)) == 45.5


def test_minkowski_imaginary_quadratic():
    b = minkowski_bound(FieldShape(2, 1, 59))
    assert _close_above(b, oracle_minkowski(2, 1, 59))
    assert b == pytest.approx(4.889969257530329, rel=1e-15)


def test_class_bound_million():
    report = class_number_upper_bound(FieldShape(2, 0, 10**6))
    assert report.minkowski_bound == 500.0
    b, h = oracle_class_bound(2, 0, 10**6)
    assert _close_above(report.class_number_bound, h)
    assert report.class_number_bound == pytest.approx(77242.70763394, rel=1e-12)
    assert report.applicable


def test_applicability_threshold_is_strict():
    # sqrt(1156)/2 = 17 exactly, which does not exceed 17
    at = class_number_upper_bound(FieldShape(2, 0, 1156))
    assert at.minkowski_bound == 17.0
    assert not at.applicable
    assert class_number_upper_bound(FieldShape(2, 0, 1157)).applicable


def test_bound_computed_when_not_applicable():
    report = class_number_upper_bound(FieldShape(3, 0, 3969))
    assert not report.applicable
    _, h = oracle_class_bound(3, 0, 3969)
    assert _close_above(report.class_number_bound, h)


@pytest.mark.parametrize("bad", [(0, 0, 1), (2, 2, 5), (3, -1, 5), (2, 0, 0)])
def test_field_shape_validation(bad):
    with pytest.raises(ValueError):
        FieldShape(*bad)


def test_quadratic_bounds():
    imag = quadratic_class_bound(-9011, imaginary=True)
    assert imag.precondition_met
    assert _close_above(imag.value, oracle_quadratic(9011, True))
    assert imag.value == pytest.approx(7871.56, abs=0.01)

    small = quadratic_class_bound(59, imaginary=True)
    assert not small.precondition_met
    assert small.value == pytest.approx(127.709, abs=1e-3)

    real = quadratic_class_bound(5, imaginary=False)
    assert real.precondition_met
    assert _close_above(real.value, oracle_quadratic(5, False))


def test_quadratic_threshold_boundary():
    assert not quadratic_class_bound(3000, imaginary=True).precondition_met
    assert quadratic_class_bound(3001, imaginary=True).precondition_met


def test_quadratic_subfield_discriminant():
    assert quadratic_subfield_discriminant(59) == -59
    assert quadratic_subfield_discriminant(13) == 13
    assert quadratic_subfield_discriminant(163) == -163
    for bad in (2, 9, 1):
        with pytest.raises(NotOddPrime):
            quadratic_subfield_discriminant(bad)


def test_global_mpmath_precision_untouched():
    before = mpmath.mp.prec
    class_number_upper_bound(FieldShape(7, 3, 10**11))
    assert mpmath.mp.prec == before


shapes = st.integers(min_value=1, max_value=12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.integers(min_value=0, max_value=n // 2),
        st.integers(min_value=1, max_value=10**12),
    )
)


@settings(max_examples=150, deadline=None)
@given(shapes)
def test_upward_rounding_against_double_precision_oracle(shape):
    n, r2, d = shape
    report = class_number_upper_bound(FieldShape(n, r2, d))
    b, h = oracle_class_bound(n, r2, d, digits=180)
    assert _close_above(report.minkowski_bound, b)
    if abs(h) > Decimal("1e-300"):
        assert Decimal(report.class_number_bound) >= h
        assert abs(Decimal(report.class_number_bound) - h) <= abs(h) * Decimal("1e-12")
