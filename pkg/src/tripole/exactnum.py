"""Exact arithmetic in the quadratic field Q(sqrt 3).

Every coordinate, gradient entry and displacement value of the tripole-star
construction is of the form ``a + b*sqrt(3)`` with rational ``a`` and ``b``.
:class:`QScalar` stores the two rationals as :class:`fractions.Fraction`, so
there is no overflow at deep generations and equality is structural.
"""

from __future__ import annotations

import ast
import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

SQRT3_FLOAT = math.sqrt(3.0)

Number = Union[int, Fraction, "QScalar"]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


class QScalar:
    """The number ``a + b*sqrt(3)`` with rational coefficients."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _as_fraction(a))
        object.__setattr__(self, "b", _as_fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QScalar is immutable")

    @classmethod
    def coerce(cls, x) -> QScalar:
        if isinstance(x, QScalar):
            return x
        if isinstance(x, float):
            raise TypeError("floats are not exact; convert with Fraction first")
        return cls(x, 0)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QScalar(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> QScalar:
        return QScalar(-self.a, -self.b)

    def __pos__(self) -> QScalar:
        return self

    def __sub__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return QScalar(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, QScalar):
            return QScalar(
                self.a * other.a + 3 * self.b * other.b,
                self.a * other.b + self.b * other.a,
            )
        if isinstance(other, (int, Fraction)):
            return QScalar(self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> QScalar:
        return QScalar(self.a, -self.b)

    def norm(self) -> Fraction:
        """Field norm ``a^2 - 3 b^2``; zero only for the zero element."""
        return self.a * self.a - 3 * self.b * self.b

    def inverse(self) -> QScalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 3)")
        return QScalar(self.a / n, -self.b / n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt 3)")
            return QScalar(self.a / other, self.b / other)
        if isinstance(other, QScalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        try:
            o = QScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> QScalar:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __abs__(self) -> QScalar:
        return -self if self.sign() < 0 else self

    # -- order ------------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(3)`` without any floating point."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger of a^2 and 3b^2 wins
        d = self.a * self.a - 3 * self.b * self.b
        return sa if d > 0 else sb

    def _cmp(self, other) -> int:
        return (self - QScalar.coerce(other)).sign()

    def __eq__(self, other):
        if isinstance(other, QScalar):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    # -- conversion -------------------------------------------------------

    def __float__(self) -> float:
        return to_float(self)

    def __repr__(self):
        return f"QScalar({self.a!s}, {self.b!s})"

    def __str__(self):
        # written so that parse_qscalar reads it back: 3√3/2, not 3/2√3
        if self.b == 0:
            return str(self.a)
        b = abs(self.b)
        num = "" if b.numerator == 1 else str(b.numerator)
        rad = f"{num}√3" + ("" if b.denominator == 1 else f"/{b.denominator}")
        sign = "-" if self.b < 0 else ("+" if self.a != 0 else "")
        return (str(self.a) if self.a != 0 else "") + sign + rad

    def is_rational(self) -> bool:
        return self.b == 0

    def sqrt(self) -> QScalar:
        """Exact square root when it exists in the field, else ValueError."""
        if self.sign() < 0:
            raise ValueError(f"negative argument {self}")
        if not self:
            return ZERO
        a, b = self.a, self.b
        if b == 0:
            r = _rational_sqrt(a)
            if r is not None:
                return QScalar(r)
            r = _rational_sqrt(a / 3)
            if r is not None:
                return QScalar(0, r)
            raise ValueError(f"{self} is not a square in Q(sqrt 3)")
        # (c + d sqrt3)^2 = c^2 + 3 d^2 + 2 c d sqrt3
        disc = _rational_sqrt(a * a - 3 * b * b)
        if disc is not None:
            for c2 in ((a + disc) / 2, (a - disc) / 2):
                c = _rational_sqrt(c2) if c2 > 0 else None
                if c:
                    root = QScalar(c, b / (2 * c))
                    if root.sign() < 0:
                        root = -root
                    return root
        raise ValueError(f"{self} is not a square in Q(sqrt 3)")


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


ZERO = QScalar(0, 0)
ONE = QScalar(1, 0)
SQRT3 = QScalar(0, 1)
# tan(pi/12) = 2 - sqrt(3)
T = QScalar(2, -1)


def qs(a=0, b=0) -> QScalar:
    return QScalar(a, b)


def qs_arith(x, y, op: str) -> QScalar:
    """Apply ``op`` in {add, sub, mul, div, neg} to two field elements."""
    x = QScalar.coerce(x)
    y = QScalar.coerce(y)
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "neg":
        return -x
    raise ValueError(f"unknown op {op!r}")


@lru_cache(maxsize=1024)
def t_power(k: int) -> QScalar:
    """Exact ``t**k`` with ``t = tan(pi/12) = 2 - sqrt(3)``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return T**k


def to_float(x) -> float:
    """Float value of ``a + b*sqrt(3)``, free of cancellation.

    When ``a`` and ``b*sqrt(3)`` nearly cancel (as in high powers of ``t``),
    the value is computed as ``norm / (a - b*sqrt(3))`` where the norm is an
    exact rational and the denominator has no cancellation.
    """
    if isinstance(x, float):
        return x
    if not isinstance(x, QScalar):
        return float(x)
    a, b = x.a, x.b
    if b == 0:
        return float(a)
    if a == 0 or (a > 0) == (b > 0):
        return float(a) + float(b) * SQRT3_FLOAT
    return float(x.norm()) / (float(a) - float(b) * SQRT3_FLOAT)


def qs_to_float(x: QScalar) -> float:
    return to_float(x)


def as_exact(x) -> QScalar:
    """Exact field element from int, Fraction, QScalar, decimal str or float.

    Floats are read through their shortest decimal representation, so
    ``0.07`` becomes ``7/100``.
    """
    if isinstance(x, QScalar):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x}")
        return QScalar(Fraction(repr(x)))
    if isinstance(x, str):
        return parse_qscalar(x)
    return QScalar.coerce(x)


_SQRT3_NAMES = {"s3", "sqrt3", "r3"}


def parse_qscalar(text: str) -> QScalar:
    """Parse expressions like ``-sqrt(3)/2``, ``3*√3/2``, ``0.07`` or ``1/2``."""
    # implicit product: 97√3 means 97*√3
    src = re.sub(r"(?<=[\d)])\s*√", "*√", text.strip())
    src = src.replace("√3", "s3").replace("√(3)", "s3")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}") from exc
    return _eval_node(tree.body, src)


def _eval_node(node, src) -> QScalar:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        if isinstance(node.value, float):
            return QScalar(Fraction(ast.get_source_segment(src, node) or repr(node.value)))
        return QScalar(node.value)
    if isinstance(node, ast.Name) and node.id in _SQRT3_NAMES:
        return SQRT3
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
    ):
        return _eval_node(node.args[0], src).sqrt()
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, src)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        left = _eval_node(node.left, src)
        right = _eval_node(node.right, src)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return left / right
        if isinstance(node.op, ast.Pow) and right.is_rational() and right.a.denominator == 1:
            return left ** int(right.a)
    raise ValueError(f"unsupported expression in {src!r}")
