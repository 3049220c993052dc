"""2-vectors and 2x2 matrices over QScalar or float.

The same classes serve the exact backend (entries in Q(sqrt 3)) and the float
backend; arithmetic simply dispatches on the entry type.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactnum import QScalar, ZERO, to_float


@dataclass(frozen=True)
class Vec2:
    x: object
    y: object

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __mul__(self, s) -> Vec2:
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s) -> Vec2:
        return Vec2(self.x / s, self.y / s)

    def __iter__(self):
        yield self.x
        yield self.y

    def dot(self, other: Vec2):
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2):
        return self.x * other.y - self.y * other.x

    def norm2(self):
        return self.dot(self)

    def perp(self) -> Vec2:
        """Counter-clockwise rotation by a right angle."""
        return Vec2(-self.y, self.x)

    def to_float(self) -> tuple[float, float]:
        return (to_float(self.x), to_float(self.y))

    def __str__(self):
        return f"({self.x}, {self.y})"


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix ``[[a11, a12], [a21, a22]]``."""

    a11: object
    a12: object
    a21: object
    a22: object

    @classmethod
    def from_rows(cls, rows) -> Mat2:
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def zero(cls) -> Mat2:
        return cls(ZERO, ZERO, ZERO, ZERO)

    @classmethod
    def identity(cls) -> Mat2:
        return cls(QScalar(1), ZERO, ZERO, QScalar(1))

    @classmethod
    def skew_of(cls, w) -> Mat2:
        """``[[0, -w], [w, 0]]``."""
        return cls(w * 0, -w, w, w * 0)

    @classmethod
    def outer(cls, a: Vec2, n: Vec2) -> Mat2:
        return cls(a.x * n.x, a.x * n.y, a.y * n.x, a.y * n.y)

    def rows(self):
        return ((self.a11, self.a12), (self.a21, self.a22))

    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def __add__(self, other: Mat2) -> Mat2:
        return Mat2(*(p + q for p, q in zip(self.entries(), other.entries())))

    def __sub__(self, other: Mat2) -> Mat2:
        return Mat2(*(p - q for p, q in zip(self.entries(), other.entries())))

    def __neg__(self) -> Mat2:
        return Mat2(*(-p for p in self.entries()))

    def __mul__(self, s) -> Mat2:
        return Mat2(*(p * s for p in self.entries()))

    __rmul__ = __mul__

    def __truediv__(self, s) -> Mat2:
        return Mat2(*(p / s for p in self.entries()))

    def __matmul__(self, other):
        if isinstance(other, Vec2):
            return Vec2(
                self.a11 * other.x + self.a12 * other.y,
                self.a21 * other.x + self.a22 * other.y,
            )
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    @property
    def T(self) -> Mat2:
        return Mat2(self.a11, self.a21, self.a12, self.a22)

    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    def trace(self):
        return self.a11 + self.a22

    def frob(self, other: Mat2):
        """Frobenius inner product ``tr(self @ other.T)``."""
        return sum((p * q for p, q in zip(self.entries(), other.entries())), start=self.a11 * 0)

    def sym(self) -> Mat2:
        off = (self.a12 + self.a21) / 2
        return Mat2(self.a11, off, off, self.a22)

    def skew(self) -> Mat2:
        off = (self.a12 - self.a21) / 2
        return Mat2(off * 0, off, -off, off * 0)

    def is_symmetric(self) -> bool:
        return self.a12 == self.a21

    def column(self, j: int) -> Vec2:
        return Vec2(self.a11, self.a21) if j == 0 else Vec2(self.a12, self.a22)

    def row(self, i: int) -> Vec2:
        return Vec2(self.a11, self.a12) if i == 0 else Vec2(self.a21, self.a22)

    def to_float(self) -> Mat2:
        return Mat2(*(to_float(p) for p in self.entries()))

    def __str__(self):
        return f"[[{self.a11}, {self.a12}], [{self.a21}, {self.a22}]]"


def exact_vec(x, y) -> Vec2:
    from .exactnum import as_exact

    return Vec2(as_exact(x), as_exact(y))


def float_to_exact(v: float) -> QScalar:
    """Exact rational value of a binary float (no decimal rounding)."""
    return QScalar(Fraction(v))
