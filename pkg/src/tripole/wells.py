"""Landau energy of the triangle-to-centered-rectangle transformation.

Holds the Landau coefficients, the derived transformation strain ``eps``,
transition temperature and energy offset, the three strain wells, the linear
and nonlinear symmetry-adapted strains, and the dev/sph/skew split of a 2x2
matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

from .exactnum import SQRT3, SQRT3_FLOAT, QScalar, to_float
from .linalg import Mat2

# symmetric matrices share the Mat2 type; symmetry is checked where it matters
SymMat2 = Mat2


class StrainTriple(NamedTuple):
    e1: object
    e2: object
    e3: object

    def to_float(self) -> StrainTriple:
        return StrainTriple(*(to_float(v) for v in self))


@dataclass(frozen=True)
class LandauParams:
    """Coefficients of the Landau polynomial.

    Defaults are the Fig. 2 values (A = 1, B = -30, C = 200, T = 0.8, Tc = 1).
    ``A1`` is not fixed by the model description; 1 is an arbitrary choice and
    only matters off the ``e1 = 0`` plane.
    """

    A1: float = 1.0
    A: float = 1.0
    B: float = -30.0
    C: float = 200.0
    T: float = 0.8
    Tc: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"{f.name} must be a finite number, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        if self.C <= 0:
            raise ValueError("C must be positive")

    @classmethod
    def from_file(cls, path) -> LandauParams:
        """Read ``key = value`` lines (keys A1, A, B, C, T, Tc); ``#`` comments."""
        known = {f.name for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, val = line.split("=", 1)
            elif ":" in line:
                key, val = line.split(":", 1)
            else:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = float(val.strip())
            except ValueError:
                raise ValueError(f"{path}:{lineno}: bad number {val.strip()!r}") from None
        return cls(**values)

    def with_values(self, **kw) -> LandauParams:
        return replace(self, **kw)

    def is_three_well(self) -> bool:
        return self.B < 0 and self.T < t0_of(self)


def epsilon_of(p: LandauParams) -> float:
    """Positive root ``(-B + sqrt(B^2 - 4 C A (T - Tc))) / 2C``."""
    disc = p.B * p.B - 4 * p.C * p.A * (p.T - p.Tc)
    if disc < 0:
        raise ValueError(f"negative discriminant {disc}: no nonzero well")
    return (-p.B + math.sqrt(disc)) / (2 * p.C)


def t0_of(p: LandauParams) -> float:
    """First-order transition temperature ``Tc + 2 B^2 / (9 A C)``."""
    if p.A * p.C == 0:
        raise ZeroDivisionError("A*C must be nonzero")
    return p.Tc + 2 * p.B * p.B / (9 * p.A * p.C)


def m_offset(p: LandauParams) -> float:
    """Constant that shifts the well energy to zero."""
    e = epsilon_of(p)
    return -(p.A / 2 * (p.T - p.Tc) * e**2 + p.B / 3 * e**3 + p.C / 4 * e**4)


def psi_L(s: StrainTriple, p: LandauParams, M: float | None = None) -> float:
    """Landau energy density; serves both linear and nonlinear strains."""
    e1, e2, e3 = (to_float(v) for v in s)
    if M is None:
        M = m_offset(p)
    r2 = e2 * e2 + e3 * e3
    return (
        p.A1 / 2 * e1 * e1
        + p.A / 2 * (p.T - p.Tc) * r2
        + p.B / 3 * (e2**3 - 3 * e2 * e3 * e3)
        + p.C / 4 * r2 * r2
        + M
    )


def well_strains(eps) -> tuple[StrainTriple, StrainTriple, StrainTriple]:
    """The three minimisers ``(e1, e2, e3)`` in well order 1, 2, 3."""
    s3 = _sqrt3(eps)
    half = eps / 2
    return (
        StrainTriple(eps * 0, eps, eps * 0),
        StrainTriple(eps * 0, -half, s3 * half),
        StrainTriple(eps * 0, -half, -s3 * half),
    )


def _sqrt3(eps):
    return SQRT3_FLOAT if isinstance(eps, float) else SQRT3


def _exactify(eps):
    if isinstance(eps, (int, Fraction)):
        return QScalar(eps)
    return eps


def wells(eps) -> tuple[Mat2, Mat2, Mat2]:
    """``E1, E2, E3``: traceless symmetric matrices with ``|E_i|^2 = 2 eps^2``."""
    eps = _exactify(eps)
    if to_float(eps) <= 0:
        raise ValueError("eps must be positive")
    s3 = _sqrt3(eps)
    h = eps / 2
    return (
        Mat2(eps, eps * 0, eps * 0, -eps),
        Mat2(-h, s3 * h, s3 * h, h),
        Mat2(-h, -s3 * h, -s3 * h, h),
    )


def well_index(E: Mat2, eps) -> int:
    """1, 2 or 3 if ``E`` equals that well exactly (floats: within 1e-12), else 0."""
    for i, W in enumerate(wells(eps), 1):
        if isinstance(E.a11, float) or isinstance(W.a11, float):
            if all(abs(to_float(x) - to_float(y)) <= 1e-12 for x, y in zip(E.entries(), W.entries())):
                return i
        elif E == W:
            return i
    return 0


def linear_strains(H: Mat2) -> StrainTriple:
    return StrainTriple((H.a11 + H.a22) / 2, (H.a11 - H.a22) / 2, (H.a12 + H.a21) / 2)


def nonlinear_strains(H: Mat2) -> StrainTriple:
    """Symmetry-adapted Lagrangian strains of ``F = I + H``."""
    F11, F12, F21, F22 = H.a11 + 1, H.a12, H.a21, H.a22 + 1
    e1 = (F11 * F11 + F21 * F21 + F12 * F12 + F22 * F22 - 2) / 4
    e2 = (F11 * F11 + F21 * F21 - F12 * F12 - F22 * F22) / 4
    e3 = (F11 * F12 + F21 * F22) / 2
    return StrainTriple(e1, e2, e3)


class Decomposition(NamedTuple):
    dev: Mat2
    sph: Mat2
    skew: Mat2


def decompose(M: Mat2) -> Decomposition:
    """``M = M_dev + M_sph + M_skew``, Frobenius-orthogonal parts."""
    sym = M.sym()
    half_tr = M.trace() / 2
    zero = half_tr * 0
    sph = Mat2(half_tr, zero, zero, half_tr)
    return Decomposition(sym - sph, sph, M.skew())
