"""The piecewise-affine displacement field on the nested tiling.

On ``omega_{X_k}`` the field is ``eps * (v_{X_k} + v_{ok})``: an affine map
whose gradient is a well plus a skew part growing linearly in ``k``.  At the
origin it takes the limit value ``eps L (sqrt3 - 2, 1) / (1 - t^2)``.

Two backends share the code: with an exact ``eps`` (int, Fraction, QScalar)
every value lives in Q(sqrt 3); with a float ``eps`` the exact unit pieces are
converted once and scaled in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .exactnum import ONE, SQRT3, ZERO, QScalar, as_exact, t_power, to_float
from .geometry import (
    FAMILIES,
    InterfaceId,
    RegionId,
    TilingParams,
    interface,
    locate,
    locate_many,
    region_vertices,
    vertex,
)
from .linalg import Mat2, Vec2


_HALF = Fraction(1, 2)

# well carried by each family: E1 <- F, B; E2 <- E, C; E3 <- A, D
WELL_OF = {"A": 3, "B": 1, "C": 2, "D": 3, "E": 2, "F": 1}
# families whose skew part carries the extra W~ = [[0, -sqrt3], [sqrt3, 0]]
HAS_WTILDE = {"A": False, "B": True, "C": True, "D": True, "E": False, "F": False}


class AffinePiece(NamedTuple):
    gradient: Mat2
    offset: Vec2

    def __call__(self, p: Vec2) -> Vec2:
        return self.gradient @ p + self.offset


class GradientInfo(NamedTuple):
    H: Mat2
    well: int
    W_k: Mat2
    w_tilde: bool


def offset_sum(k: int) -> QScalar:
    """``sum_{j=1..k} t^(2j-2) = (1 - t^(2k)) / (1 - t^2)``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return (1 - t_power(2 * k)) / (1 - t_power(2))


def skew_W(k: int, eps=ONE) -> Mat2:
    """``W_k = eps [[0, 2 sqrt3 k], [-2 sqrt3 k, 0]]``."""
    return Mat2.skew_of(-2 * k * SQRT3) * eps


def w_tilde(eps=ONE) -> Mat2:
    """``W~ = eps [[0, -sqrt3], [sqrt3, 0]]``."""
    return Mat2.skew_of(SQRT3) * eps


@lru_cache(maxsize=None)
def unit_piece(family: str, k: int, L: QScalar) -> AffinePiece:
    """``v_{X_k} + v_{ok}`` as an exact affine map (the field at ``eps = 1``)."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if k < 0:
        raise ValueError("k must be non-negative")
    s3 = SQRT3
    T = t_power(2 * k)
    LT = L * T
    if family == "A":
        G = Mat2(-_HALF * ONE, s3 * (2 * k - _HALF), -s3 * (2 * k + _HALF), _HALF * ONE)
        c = Vec2(ZERO, LT)
    elif family == "B":
        G = Mat2(ONE, s3 * (2 * k - 1), s3 * (1 - 2 * k), -ONE)
        c = Vec2(LT / 2, LT * (2 + s3) / 2)
    elif family == "C":
        G = Mat2(-_HALF * ONE, s3 * (2 * k - _HALF), s3 * (Fraction(3, 2) - 2 * k), _HALF * ONE)
        c = Vec2(ZERO, ZERO)
    elif family == "D":
        G = Mat2(-_HALF * ONE, s3 * (2 * k - Fraction(3, 2)), s3 * (_HALF - 2 * k), _HALF * ONE)
        c = Vec2(-LT * (1 + s3) / 2, LT * (1 + s3) / 2)
    elif family == "E":
        G = Mat2(-_HALF * ONE, s3 * (2 * k + _HALF), s3 * (_HALF - 2 * k), _HALF * ONE)
        c = Vec2(LT * (1 - s3) / 2, LT * (1 + s3) / 2)
    else:
        G = Mat2(ONE, 2 * k * s3, -2 * k * s3, -ONE)
        c = Vec2(-LT / 2, LT * s3 / 2)
    S = offset_sum(k)
    return AffinePiece(G, c + Vec2((s3 - 2) * L * S, L * S))


def _coerce_eps(eps):
    if isinstance(eps, float):
        if not eps > 0:
            raise ValueError("eps must be positive")
        return eps
    eps = as_exact(eps)
    if eps.sign() <= 0:
        raise ValueError("eps must be positive")
    return eps


def _coerce_rigid(z):
    if z is None:
        return None
    z = tuple(z)
    if len(z) != 3:
        raise ValueError("rigid motion needs three components (z1, z2, z3)")
    return z


@dataclass(frozen=True)
class DisplacementField:
    """The field for given ``(L, eps)`` with an optional rigid motion ``z``.

    ``overrides`` maps ``(family, k)`` to a replacement gradient; it exists so
    that the compatibility checker can be fed deliberately broken fields.
    """

    params: TilingParams = field(default_factory=TilingParams)
    eps: object = ONE
    rigid: Optional[tuple] = None
    overrides: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "eps", _coerce_eps(self.eps))
        z = _coerce_rigid(self.rigid)
        if z is not None:
            z = tuple(float(v) if self.is_float else as_exact(v) for v in z)
        object.__setattr__(self, "rigid", z)

    @property
    def is_float(self) -> bool:
        return isinstance(self.eps, float)

    @property
    def L(self) -> QScalar:
        return self.params.L

    def scalar(self, x):
        """Convert an exact constant to this field's backend."""
        return to_float(x) if self.is_float else x

    def rigid_matrix(self) -> Optional[Mat2]:
        if self.rigid is None:
            return None
        z1 = self.rigid[0]
        return Mat2(z1 * 0, z1, -z1, z1 * 0)

    def with_override(self, family: str, k: int, gradient: Mat2) -> DisplacementField:
        ov = dict(self.overrides)
        ov[(family, k)] = gradient
        return replace(self, overrides=tuple(sorted(ov.items(), key=lambda kv: kv[0])))

    def to_float(self) -> DisplacementField:
        if self.is_float:
            return self
        return replace(
            self,
            eps=to_float(self.eps),
            rigid=None if self.rigid is None else tuple(to_float(v) for v in self.rigid),
            overrides=tuple((key, G.to_float()) for key, G in self.overrides),
        )


def with_rigid_motion(f: DisplacementField, z) -> DisplacementField:
    """``u_z = u + [[0, z1], [-z1, 0]] p + (z2, z3)``; ``z = 0`` gives ``f`` back."""
    z = _coerce_rigid(z)
    if z is not None and all(v == 0 for v in z):
        z = None
    return replace(f, rigid=z)


def _scale_piece(unit: AffinePiece, eps) -> AffinePiece:
    if isinstance(eps, float):
        return AffinePiece(unit.gradient.to_float() * eps, Vec2(*unit.offset.to_float()) * eps)
    return AffinePiece(unit.gradient * eps, unit.offset * eps)


def piece(family: str, k: int, f: DisplacementField, with_rigid: bool = True) -> AffinePiece:
    """The affine map of ``u`` on ``omega_{X_k}``."""
    p = _scale_piece(unit_piece(family, k, f.L), f.eps)
    for key, G in f.overrides:
        if key == (family, k):
            p = AffinePiece(G, p.offset)
    if with_rigid and f.rigid is not None:
        p = AffinePiece(p.gradient + f.rigid_matrix(), p.offset + Vec2(f.rigid[1], f.rigid[2]))
    return p


def grad_u(id: RegionId, f: DisplacementField) -> GradientInfo:
    """Gradient on a region plus its split into well, ``W_k`` and ``W~``."""
    fam, k = id
    H = piece(fam, k, f).gradient
    W = skew_W(k)
    W = W.to_float() * f.eps if f.is_float else W * f.eps
    return GradientInfo(H, WELL_OF[fam], W, HAS_WTILDE[fam])


def origin_value(f: DisplacementField) -> Vec2:
    """``eps L (sqrt3 - 2, 1) / (1 - t^2)`` plus ``(z2, z3)`` if a rigid motion is set."""
    inv = 1 / (1 - t_power(2))
    v = Vec2((SQRT3 - 2) * f.L * inv, f.L * inv)
    v = Vec2(*v.to_float()) * f.eps if f.is_float else v * f.eps
    if f.rigid is not None:
        v = v + Vec2(f.rigid[1], f.rigid[2])
    return v


class OutsideDiskError(ValueError):
    pass


def _exact_point(p) -> Vec2:
    x, y = p
    conv = lambda v: QScalar(Fraction(v)) if isinstance(v, float) else as_exact(v)  # noqa: E731
    return Vec2(conv(x), conv(y))


def owning_region(p: Vec2, f: DisplacementField):
    """Region whose piece is used at ``p`` (None at the origin)."""
    loc = locate(p, f.params)
    if loc.kind == "outside":
        raise OutsideDiskError(f"point {p.to_float()} lies outside the disk")
    if loc.kind == "origin":
        return None, loc
    if loc.kind == "interface":
        seg = interface(loc.interface, f.params)
        return min(seg.minus, seg.plus), loc
    return loc.region, loc


def eval_u(p, f: DisplacementField) -> Vec2:
    """``u(p)`` for ``p`` in the closed disk; floats are read as exact binary values."""
    p = _exact_point(p)
    rid, _ = owning_region(p, f)
    if rid is None:
        return origin_value(f)
    pc = p if not f.is_float else Vec2(*p.to_float())
    return piece(rid.family, rid.k, f)(pc)


def vertex_value(family: str, k: int, f: DisplacementField) -> Vec2:
    """``u`` at the vertex ``X_k``, taken from the piece of ``omega_{X_k}``."""
    v = vertex(family, k, f.params)
    if f.is_float:
        v = Vec2(*v.to_float())
    return piece(family, k, f)(v)


def printed_vertex_value(family: str, k: int, f: DisplacementField) -> Vec2:
    """Closed forms for ``u(A_k), u(B_k), u(C_k)`` as stated for the proof."""
    s3, L = SQRT3, f.L
    T = t_power(2 * k)
    S = offset_sum(k)
    if family == "A":
        x = T * (-1 / s3 - _HALF + k * (2 + s3))
        y = T * (1 / (2 * s3) + 1 - k)
    elif family == "B":
        x = T * (k * (s3 - 1) + _HALF - 1 / s3)
        y = T * (k * (s3 - 1) + 1 + 1 / (2 * s3))
    elif family == "C":
        x = T * (k * (2 - s3) + s3 / 6 - _HALF)
        y = T * (-k + _HALF + 1 / (2 * s3))
    else:
        raise ValueError("closed forms exist for A, B and C only")
    v = Vec2(L * (x + (s3 - 2) * S), L * (y + S))
    return _finish(v, vertex(family, k, f.params), f)


def _finish(unit_value: Vec2, p: Vec2, f: DisplacementField) -> Vec2:
    """Scale a unit-eps value by eps and add the rigid motion at ``p``."""
    if f.is_float:
        v = Vec2(*unit_value.to_float()) * f.eps
        p = Vec2(*p.to_float())
    else:
        v = unit_value * f.eps
    if f.rigid is not None:
        v = v + f.rigid_matrix() @ p + Vec2(f.rigid[1], f.rigid[2])
    return v


def printed_trace(kind: str, k: int, p: Vec2, L: QScalar) -> Vec2:
    """One-sided limit on interface ``kind`` at generation ``k`` (unit eps)."""
    s3 = SQRT3
    T = t_power(2 * k)
    LT = L * T
    x, y = p.x, p.y
    h = _HALF
    if kind == "BA":
        v = (-2 * x + 6 * k * x + LT * (2 * k - h), -2 * s3 * k * x + LT / (2 * s3) + LT)
    elif kind == "EB":
        v = (
            2 * k * x + LT * 2 * k / s3 + LT / (2 * s3) * (s3 - 2),
            2 / s3 * x - 2 * k * s3 * x + LT * s3 / 2 + LT * Fraction(2, 3),
        )
    elif kind == "ED":
        v = (
            -x / 2 - LT * k - LT * (s3 / 2 - Fraction(1, 4)),
            s3 / 2 * x - 2 * k * s3 * x - LT / (4 * s3) + LT * (1 + s3) / 2,
        )
    elif kind == "DF":
        v = (
            x - 2 * k * x - LT / s3 * 2 * k - LT * h,
            x / s3 - 2 * k * s3 * x + LT / 3 + LT * s3 / 2,
        )
    elif kind == "CF":
        v = (x - 6 * k * x - LT / 2 + 2 * k * LT, -2 * k * s3 * x + s3 * x + LT / (2 * s3))
    elif kind == "CA":
        v = (-LT / (4 * s3) + 2 * k * s3 * y - s3 / 2 * y, -k * LT + y / 2 + LT * Fraction(3, 4))
    elif kind == "BA+":
        v = (
            -2 * k * x + 2 * k * LT * (2 / s3 - 1) + LT * (h - 1 / s3),
            -2 * x / s3 - 2 * s3 * k * x + LT * (Fraction(4, 3) - 1 / (2 * s3)),
        )
    elif kind == "BE+":
        v = (-2 * x - 6 * k * x + LT * (-h - 4 * k + 2 * k * s3), -2 * k * x * s3 + LT * (1 + 1 / (2 * s3)))
    elif kind == "DE+":
        v = (s3 * (h + 2 * k) * y + LT * (Fraction(1, 4) - 1 / s3), y / 2 + LT * (2 * k - k * s3 + s3 * Fraction(3, 4)))
    elif kind == "DF+":
        v = (
            x + 6 * k * x - h * LT + 2 * k * s3 * LT - 4 * k * LT,
            x * (-s3 - 2 * k * s3) + LT * (-1 + 7 / (2 * s3)),
        )
    elif kind == "FC+":
        v = (
            x * (1 + 2 * k) + LT * (2 * k - 4 * k / s3 - h),
            x * (-2 * k * s3 - 1 / s3) + LT * (Fraction(2, 3) + 1 / (2 * s3)),
        )
    elif kind == "AC+":
        v = (
            -x / 2 + LT * (s3 / 4 - h + 2 * k - s3 * k),
            -s3 / 2 * x - 2 * k * s3 * x + LT * (1 / (2 * s3) + Fraction(3, 4)),
        )
    else:
        raise ValueError(f"unknown interface kind {kind!r}")
    S = offset_sum(k)
    return Vec2(v[0] + (s3 - 2) * L * S, v[1] + L * S)


class Trace(NamedTuple):
    point: Vec2
    minus: Vec2
    plus: Vec2
    printed: Vec2


def interface_trace(id: InterfaceId, s, f: DisplacementField) -> Trace:
    """Values of both adjacent pieces and of the printed formula at ``P0 + s (P1 - P0)``."""
    s = as_exact(s)
    if s < 0 or s > 1:
        raise ValueError("s must lie in [0, 1]")
    seg = interface(id, f.params)
    p = seg.point_at(s)
    pe = Vec2(*p.to_float()) if f.is_float else p
    minus = piece(seg.minus.family, seg.minus.k, f)(pe)
    plus = piece(seg.plus.family, seg.plus.k, f)(pe)
    printed = _finish(printed_trace(id.kind, id.k, p, f.L), p, f)
    return Trace(p, minus, plus, printed)


# -- vectorised float evaluation ----------------------------------------------


def eval_many(x, y, f: DisplacementField):
    """Float ``u`` and region labels at many points.

    Returns ``(u1, u2, family_index, k)``.  Points that the float classifier
    leaves unassigned (interfaces, origin, outside) are resolved exactly one
    by one; points outside the disk get NaN and ``family_index = -1``.
    """
    ff = f.to_float()
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fam, gen = locate_many(x, y, f.params)
    u1 = np.full(x.shape, np.nan)
    u2 = np.full(x.shape, np.nan)
    for k in np.unique(gen[gen >= 0]):
        for j, name in enumerate(FAMILIES):
            m = (gen == k) & (fam == j)
            if not m.any():
                continue
            G, c = piece(name, int(k), ff)
            u1[m] = G.a11 * x[m] + G.a12 * y[m] + c.x
            u2[m] = G.a21 * x[m] + G.a22 * y[m] + c.y
    R2 = to_float(f.params.R2)
    left = np.flatnonzero(((fam < 0) & (x * x + y * y <= R2 * (1 + 1e-12))).ravel())
    xf, yf, u1f, u2f = x.ravel(), y.ravel(), u1.ravel(), u2.ravel()
    for i in left:
        try:
            v = eval_u((float(xf[i]), float(yf[i])), ff)
        except OutsideDiskError:
            continue
        u1f[i], u2f[i] = v.x, v.y
    return u1, u2, fam, gen


def region_vertex_values(id: RegionId, f: DisplacementField) -> list[Vec2]:
    """``u`` at the corners of a region (apex and rim points for clipped ones)."""
    pc = piece(id.family, id.k, f)
    out = []
    for v in region_vertices(id, f.params):
        out.append(pc(Vec2(*v.to_float()) if f.is_float else v))
    return out
