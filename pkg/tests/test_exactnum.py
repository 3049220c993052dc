"""Q(sqrt 3) arithmetic against sympy and mpmath."""

import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from tripole.exactnum import (
    ONE,
    SQRT3,
    ZERO,
    QScalar,
    as_exact,
    parse_qscalar,
    qs_arith,
    qs_to_float,
    t_power,
    to_float,
)

small = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)
qscalars = st.builds(QScalar, small, small)
nonzero = qscalars.filter(lambda q: q != 0)


def as_sympy(q: QScalar):
    return sympy.Rational(q.a.numerator, q.a.denominator) + sympy.Rational(q.b.numerator, q.b.denominator) * sympy.sqrt(3)


def test_t_is_tan_pi_over_12():
    assert sympy.simplify(as_sympy(t_power(1)) - sympy.tan(sympy.pi / 12)) == 0
    assert to_float(t_power(1)) == pytest.approx(math.tan(math.pi / 12), rel=1e-15)


@pytest.mark.parametrize("k", [0, 1, 2, 7, 31, 64])
def test_t_power_matches_symbolic_power(k):
    assert sympy.expand((2 - sympy.sqrt(3)) ** k - as_sympy(t_power(k))) == 0


@pytest.mark.parametrize("k", range(0, 65, 4))
def test_t_power_float_has_no_cancellation(k):
    with mpmath.workdps(60):
        ref = (2 - mpmath.sqrt(3)) ** k
        assert to_float(t_power(k)) == pytest.approx(float(ref), rel=1e-14)


def test_t_power_rejects_negative():
    with pytest.raises(ValueError):
        t_power(-1)


@settings(max_examples=200, deadline=None)
@given(qscalars, qscalars, qscalars)
def test_field_axioms(x, y, z):
    """Associativity, commutativity and distributivity hold exactly."""
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x - x == ZERO
    assert x * ONE == x


@settings(max_examples=200, deadline=None)
@given(nonzero)
def test_inverse(x):
    assert x * x.inverse() == ONE
    assert ONE / x == x.inverse()


@settings(max_examples=200, deadline=None)
@given(qscalars, qscalars)
def test_products_agree_with_sympy(x, y):
    assert sympy.expand(as_sympy(x * y) - as_sympy(x) * as_sympy(y)) == 0


@settings(max_examples=300, deadline=None)
@given(qscalars)
def test_sign_agrees_with_high_precision(x):
    with mpmath.workdps(80):
        v = mpmath.mpf(x.a.numerator) / x.a.denominator + mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(3)
        ref = 0 if v == 0 else (1 if v > 0 else -1)
    assert x.sign() == ref


@settings(max_examples=300, deadline=None)
@given(qscalars, qscalars)
def test_order_is_consistent_with_subtraction(x, y):
    assert (x < y) == ((y - x).sign() > 0)
    assert (x == y) == ((x - y).sign() == 0)


def test_sign_on_nearly_cancelling_values():
    # 1351/780 is a convergent of sqrt3; the difference is ~ 1e-7 * 1/1351
    assert QScalar(Fraction(1351, 780), -1).sign() == 1
    assert QScalar(Fraction(-1351, 780), 1).sign() == -1
    assert (t_power(40) - QScalar(0)).sign() == 1


@settings(max_examples=200, deadline=None)
@given(qscalars)
def test_sqrt_of_square(x):
    r = (x * x).sqrt()
    assert r == abs(x)


def test_sqrt_non_square_raises():
    with pytest.raises(ValueError):
        QScalar(2).sqrt()
    with pytest.raises(ValueError):
        QScalar(-1).sqrt()
    assert QScalar(3).sqrt() == SQRT3
    assert QScalar(4, -2).sqrt() == QScalar(-1, 1)  # (sqrt3 - 1)^2


def test_immutable():
    q = QScalar(1, 2)
    with pytest.raises(AttributeError):
        q.a = Fraction(3)


def test_floats_are_not_silently_mixed():
    with pytest.raises(TypeError):
        QScalar(1) + 0.5


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1/2", QScalar(Fraction(1, 2))),
        ("0.07", QScalar(Fraction(7, 100))),
        ("-sqrt3/2", QScalar(0, Fraction(-1, 2))),
        ("sqrt(3)", SQRT3),
        ("3*√3/2", QScalar(0, Fraction(3, 2))),
        ("2 - s3", QScalar(2, -1)),
        ("(1 + r3)**2", QScalar(4, 2)),
    ],
)
def test_parse(text, expected):
    assert parse_qscalar(text) == expected


@pytest.mark.parametrize("text", ["", "x", "sqrt(2)", "1/", "__import__('os')"])
def test_parse_rejects(text):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_qscalar(text)


def test_as_exact_reads_floats_by_their_shortest_repr():
    assert as_exact(0.07) == QScalar(Fraction(7, 100))
    assert as_exact(Fraction(1, 3)) == QScalar(Fraction(1, 3))
    with pytest.raises(ValueError):
        as_exact(float("nan"))


def test_qs_arith():
    x, y = QScalar(1, 1), QScalar(2, -1)
    assert qs_arith(x, y, "add") == QScalar(3, 0)
    assert qs_arith(x, y, "mul") == QScalar(-1, 1)
    assert qs_arith(x, y, "div") * y == x
    assert qs_arith(x, y, "neg") == -x
    with pytest.raises(ValueError):
        qs_arith(x, y, "pow")
    assert qs_to_float(x) == pytest.approx(1 + math.sqrt(3), rel=1e-16)


@pytest.mark.parametrize(
    "q, text",
    [
        (QScalar(0, 1), "√3"),
        (QScalar(0, -1), "-√3"),
        (QScalar(0, Fraction(1, 2)), "√3/2"),
        (QScalar(-84, Fraction(97, 2)), "-84+97√3/2"),
        (QScalar(Fraction(1, 3), -2), "1/3-2√3"),
        (QScalar(5), "5"),
    ],
)
def test_str(q, text):
    assert str(q) == text


@settings(max_examples=200, deadline=None)
@given(qscalars)
def test_str_round_trips_through_parser(q):
    assert parse_qscalar(str(q)) == q
