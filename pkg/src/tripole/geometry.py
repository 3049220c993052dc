"""Nested kite tiling of the disk ``B_R(0,0)``.

Generation ``k`` consists of six open regions ``A_k .. F_k``.  ``A_k, E_k, F_k``
are kites at every generation, ``B_k, C_k, D_k`` are kites for ``k >= 1`` and
disk-clipped wedges at ``k = 0``.  All vertices are ``t^(2k)`` times one of six
base vertices, with ``t = tan(pi/12) = 2 - sqrt(3)``, and every boundary piece
is a segment of one of twelve line families.

Everything here is exact: coordinates are :class:`QScalar` and point
classification uses exact sign tests.  A vectorised float classifier,
:func:`locate_many`, exists for dense sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np

from .exactnum import ONE, SQRT3, ZERO, QScalar, as_exact, t_power, to_float
from .linalg import Vec2

FAMILIES = "ABCDEF"
KITE_FAMILIES_ALL_K = "AEF"
CLIPPED_FAMILIES = "BCD"

INTRA_KINDS = ("BA", "CA", "CF", "DF", "ED", "EB")
CROSS_KINDS = ("BA+", "AC+", "FC+", "DF+", "DE+", "BE+")
INTERFACE_KINDS = INTRA_KINDS + CROSS_KINDS

_HALF = Fraction(1, 2)

# base vertices for L = 1
BASE_VERTICES = {
    "A": Vec2(1 / (2 * SQRT3), _HALF + 1 / SQRT3),
    "B": Vec2((1 - SQRT3) / (2 * SQRT3), -(1 - SQRT3) / (2 * SQRT3)),
    "C": Vec2(SQRT3 / 6, 1 / SQRT3 - _HALF),
    "D": Vec2(_HALF - 1 / SQRT3, -1 / (2 * SQRT3)),
    "E": Vec2((-2 - SQRT3) / (2 * SQRT3), -1 / (2 * SQRT3)),
    "F": Vec2((1 + SQRT3) / (2 * SQRT3), -(1 + SQRT3) / (2 * SQRT3)),
}

# largest |coordinate| over the base vertices: y_A = -x_E = 1/2 + 1/sqrt3
BASE_SCALE = _HALF + 1 / SQRT3

# Table of the twelve line families.  ("y", m, c): y = m x + c L t^(2k);
# ("x", None, c): x = c L t^(2k).
_LINES = {
    "BA": ("y", SQRT3, 1 / SQRT3),
    "CA": ("x", None, 1 / (2 * SQRT3)),
    "CF": ("y", -SQRT3, 1 / SQRT3),
    "DF": ("y", -1 / SQRT3, QScalar(Fraction(-1, 3))),
    "ED": ("y", ZERO, -1 / (2 * SQRT3)),
    "EB": ("y", 1 / SQRT3, QScalar(Fraction(1, 3))),
    "BA+": ("y", -1 / SQRT3, Fraction(2, 3) - 1 / SQRT3),
    "AC+": ("y", ZERO, 1 / SQRT3 - _HALF),
    "FC+": ("y", 1 / SQRT3, 1 / SQRT3 - Fraction(2, 3)),
    "DF+": ("y", SQRT3, 1 - 2 / SQRT3),
    "DE+": ("x", None, _HALF - 1 / SQRT3),
    "BE+": ("y", -SQRT3, 1 - 2 / SQRT3),
}

# Segment endpoints as (family, generation offset) pairs.
_ENDPOINTS = {
    "BA": (("B", 0), ("A", 0)),
    "CA": (("C", 0), ("A", 0)),
    "CF": (("C", 0), ("F", 0)),
    "DF": (("D", 0), ("F", 0)),
    "ED": (("E", 0), ("D", 0)),
    "EB": (("E", 0), ("B", 0)),
    "BA+": (("B", 0), ("A", 1)),
    "AC+": (("A", 1), ("C", 0)),
    "FC+": (("F", 1), ("C", 0)),
    "DF+": (("D", 0), ("F", 1)),
    "DE+": (("D", 0), ("E", 1)),
    "BE+": (("B", 0), ("E", 1)),
}

# (region on the negative side, region on the positive side) of each interface,
# as (family, generation offset); the normal points into the positive side.
_SIDES = {
    "BA": (("A", 0), ("B", 0)),
    "CA": (("A", 0), ("C", 0)),
    "CF": (("F", 0), ("C", 0)),
    "DF": (("D", 0), ("F", 0)),
    "ED": (("D", 0), ("E", 0)),
    "EB": (("E", 0), ("B", 0)),
    "BA+": (("B", 1), ("A", 0)),
    "AC+": (("C", 1), ("A", 0)),
    "FC+": (("F", 0), ("C", 1)),
    "DF+": (("F", 0), ("D", 1)),
    "DE+": (("E", 0), ("D", 1)),
    "BE+": (("E", 0), ("B", 1)),
}

# Region inequality sets: (line kind, generation offset, side) with side +1
# meaning n.p > d.  Clipped k = 0 regions keep only the first two.
_CONSTRAINTS = {
    "A": (("BA", 0, -1), ("CA", 0, -1), ("BA+", 0, +1), ("AC+", 0, +1)),
    "B": (("BA", 0, +1), ("EB", 0, +1), ("BA+", -1, -1), ("BE+", -1, +1)),
    "C": (("CF", 0, +1), ("CA", 0, +1), ("AC+", -1, -1), ("FC+", -1, +1)),
    "D": (("ED", 0, -1), ("DF", 0, -1), ("DE+", -1, +1), ("DF+", -1, +1)),
    "E": (("ED", 0, +1), ("EB", 0, -1), ("BE+", 0, -1), ("DE+", 0, -1)),
    "F": (("CF", 0, -1), ("DF", 0, +1), ("FC+", 0, -1), ("DF+", 0, -1)),
}

# Kite vertices in cyclic order, as (family, generation offset).
_KITE_VERTICES = {
    "A": (("A", 0), ("B", 0), ("A", 1), ("C", 0)),
    "E": (("E", 0), ("B", 0), ("E", 1), ("D", 0)),
    "F": (("F", 0), ("C", 0), ("F", 1), ("D", 0)),
    "B": (("B", 0), ("A", 0), ("B", -1), ("E", 0)),
    "C": (("C", 0), ("A", 0), ("C", -1), ("F", 0)),
    "D": (("D", 0), ("E", 0), ("D", -1), ("F", 0)),
}

# Apex and the two rim vertices (on the circle) of the clipped k = 0 wedges.
_CLIPPED = {"B": ("B", "A", "E"), "C": ("C", "A", "F"), "D": ("D", "E", "F")}


class RegionId(NamedTuple):
    family: str
    k: int

    def __str__(self):
        return f"{self.family}{self.k}"


class InterfaceId(NamedTuple):
    kind: str
    k: int

    def __str__(self):
        return f"{self.kind}{self.k}" if not self.kind.endswith("+") else f"{self.kind[:-1]}+{self.k}"


@dataclass(frozen=True)
class TilingParams:
    """Length scale ``L`` (exact) and truncation generation ``kmax``."""

    L: QScalar = field(default_factory=lambda: ONE)
    kmax: int = 8

    def __post_init__(self):
        L = as_exact(self.L)
        if L.sign() <= 0:
            raise ValueError("L must be positive")
        if self.kmax < 0:
            raise ValueError("kmax must be non-negative")
        object.__setattr__(self, "L", L)

    @property
    def R2(self) -> QScalar:
        """Squared disk radius ``L^2 (2/3 + 1/sqrt3)``."""
        return self.L * self.L * (Fraction(2, 3) + 1 / SQRT3)

    @property
    def R(self) -> float:
        return math.sqrt(to_float(self.R2))

    def disk_area(self) -> float:
        return math.pi * to_float(self.R2)


@dataclass(frozen=True)
class Line:
    """The line ``n . p = d`` with exact unit normal ``n``."""

    normal: Vec2
    d: QScalar

    def value(self, p: Vec2) -> QScalar:
        return self.normal.dot(p) - self.d


@dataclass(frozen=True)
class LineSegment:
    id: InterfaceId
    line: Line
    p0: Vec2
    p1: Vec2
    minus: RegionId
    plus: RegionId

    @property
    def normal(self) -> Vec2:
        return self.line.normal

    def point_at(self, s) -> Vec2:
        return self.p0 + (self.p1 - self.p0) * s

    @property
    def direction(self) -> Vec2:
        return self.p1 - self.p0

    def contains(self, p: Vec2) -> bool:
        """Exact test for ``p`` on the closed segment."""
        if self.line.value(p) != 0:
            return False
        d = self.direction
        s = (p - self.p0).dot(d)
        return s >= 0 and s <= d.norm2()


def _unit_scale(m: QScalar) -> QScalar:
    """``1/|(-m, 1)|`` for the slopes occurring in the tiling."""
    m2 = m * m
    if m2 == 0:
        return ONE
    if m2 == 3:
        return QScalar(_HALF)
    if m2 == Fraction(1, 3):
        return SQRT3 / 2
    raise ValueError(f"unexpected slope {m}")


@lru_cache(maxsize=None)
def _scale(L: QScalar, k: int) -> QScalar:
    return L * t_power(2 * k)


def vertex(family: str, k: int, params: TilingParams) -> Vec2:
    """Vertex ``X_k = t^(2k) L X`` of the tiling."""
    if family not in FAMILIES:
        raise ValueError(f"unknown vertex family {family!r}")
    if k < 0:
        raise ValueError("k must be non-negative")
    return BASE_VERTICES[family] * _scale(params.L, k)


@lru_cache(maxsize=None)
def _line(kind: str, k: int, L: QScalar) -> Line:
    form, m, c = _LINES[kind]
    c = c * _scale(L, k)
    if form == "x":
        return Line(Vec2(ONE, ZERO), c)
    s = _unit_scale(m)
    return Line(Vec2(-m * s, s), c * s)


def interface(id: InterfaceId, params: TilingParams) -> LineSegment:
    kind, k = id
    if kind not in _LINES:
        raise ValueError(f"unknown interface kind {kind!r}")
    if k < 0:
        raise ValueError("k must be non-negative")
    return _interface(kind, k, params.L)


@lru_cache(maxsize=None)
def _interface(kind: str, k: int, L: QScalar) -> LineSegment:
    params = TilingParams(L)
    (f0, o0), (f1, o1) = _ENDPOINTS[kind]
    (fm, om), (fp, op) = _SIDES[kind]
    return LineSegment(
        id=InterfaceId(kind, k),
        line=_line(kind, k, L),
        p0=vertex(f0, k + o0, params),
        p1=vertex(f1, k + o1, params),
        minus=RegionId(fm, k + om),
        plus=RegionId(fp, k + op),
    )


def all_interfaces(kmax: int):
    for k in range(kmax + 1):
        for kind in INTERFACE_KINDS:
            yield InterfaceId(kind, k)


def all_regions(kmax: int):
    for k in range(kmax + 1):
        for fam in FAMILIES:
            yield RegionId(fam, k)


def region_constraints(id: RegionId, params: TilingParams):
    """The (line, side) pairs whose strict inequalities define the region."""
    fam, k = id
    cons = _CONSTRAINTS[fam]
    if k == 0 and fam in CLIPPED_FAMILIES:
        cons = cons[:2]
    return [(_line(kind, k + off, params.L), side) for kind, off, side in cons]


def is_kite(id: RegionId) -> bool:
    return not (id.k == 0 and id.family in CLIPPED_FAMILIES)


def kite_vertices(id: RegionId, params: TilingParams) -> list[Vec2]:
    if not is_kite(id):
        raise ValueError(f"{id} is disk-clipped, not a kite")
    return [vertex(f, id.k + off, params) for f, off in _KITE_VERTICES[id.family]]


def region_vertices(id: RegionId, params: TilingParams) -> list[Vec2]:
    """Kite corners, or apex plus the two rim points for clipped regions."""
    if is_kite(id):
        return kite_vertices(id, params)
    return [vertex(f, 0, params) for f in _CLIPPED[id.family]]


def region_contains(p: Vec2, id: RegionId, params: TilingParams) -> bool:
    """Strict membership of ``p`` in the open region ``id``."""
    if id.k < 0 or id.family not in FAMILIES:
        return False
    if p.norm2() >= params.R2:
        return False
    for line, side in region_constraints(id, params):
        if line.value(p).sign() != side:
            return False
    return True


def _closure_contains(p: Vec2, id: RegionId, params: TilingParams) -> bool:
    for line, side in region_constraints(id, params):
        if line.value(p).sign() == -side:
            return False
    return p.norm2() <= params.R2


@dataclass(frozen=True)
class Location:
    """Result of :func:`locate`.

    ``kind`` is one of ``region``, ``interface``, ``origin``, ``boundary``
    (on the circle, with ``region`` the clipped or kite region whose closure
    holds it) or ``outside``.
    """

    kind: str
    region: Optional[RegionId] = None
    interface: Optional[InterfaceId] = None

    def __str__(self):
        if self.kind == "region":
            return f"region {self.region}"
        if self.kind == "interface":
            return f"interface {self.interface}"
        if self.kind == "boundary":
            return f"boundary of {self.region}"
        return self.kind


def generation_bracket(p: Vec2, params: TilingParams) -> int:
    """Largest ``k`` with ``t^(2k) L (1/2 + 1/sqrt3) >= max(|x|, |y|)``."""
    s = max(abs(p.x), abs(p.y))
    if s == 0:
        raise ValueError("origin has no generation")
    top = BASE_SCALE * params.L
    # float estimate, then exact correction
    ratio = to_float(s) / to_float(top)
    k = 0
    if 0 < ratio < 1:
        k = max(0, int(math.floor(math.log(ratio) / math.log(to_float(t_power(2))))) - 1)
    while k > 0 and top * t_power(2 * k) < s:
        k -= 1
    while top * t_power(2 * k + 2) >= s:
        k += 1
    return k


def locate(p: Vec2, params: TilingParams) -> Location:
    """Exact classification of a point of the plane."""
    p = Vec2(as_exact(p.x), as_exact(p.y))
    if p.x == 0 and p.y == 0:
        return Location("origin")
    r2 = p.norm2()
    if r2 > params.R2:
        return Location("outside")
    k0 = generation_bracket(p, params)
    gens = range(max(0, k0 - 2), k0 + 3)
    for k in gens:
        for kind in INTERFACE_KINDS:
            seg = _interface(kind, k, params.L)
            if seg.contains(p):
                if r2 == params.R2:
                    return Location("boundary", region=min(seg.minus, seg.plus))
                return Location("interface", interface=seg.id)
    if r2 == params.R2:
        for fam in FAMILIES:
            rid = RegionId(fam, 0)
            if _closure_contains(p, rid, params):
                return Location("boundary", region=rid)
    for k in gens:
        for fam in FAMILIES:
            rid = RegionId(fam, k)
            if region_contains(p, rid, params):
                return Location("region", region=rid)
    raise RuntimeError(f"point {p} was not classified")  # pragma: no cover


def shoelace(points: list[Vec2]) -> QScalar:
    s = points[0].x * 0
    for i, a in enumerate(points):
        b = points[(i + 1) % len(points)]
        s = s + a.cross(b)
    return abs(s) / 2


def _clipped_area(id: RegionId, params: TilingParams) -> float:
    apex, p, q = region_vertices(id, params)
    # wedge = triangle (apex, p, q) + circular segment beyond chord pq; the
    # segment is the minor one because apex and origin lie on the same side
    chord = q - p
    side_apex = chord.cross(apex - p).sign()
    side_origin = chord.cross(Vec2(ZERO, ZERO) - p).sign()
    if side_apex != side_origin:
        raise RuntimeError("clipped region is not a minor-segment wedge")
    tri = to_float(shoelace([apex, p, q]))
    R2 = to_float(params.R2)
    cos_theta = to_float(p.dot(q) / params.R2)
    theta = math.acos(max(-1.0, min(1.0, cos_theta)))
    return tri + 0.5 * R2 * (theta - math.sin(theta))


def region_area(id: RegionId, params: TilingParams):
    """Exact area for kites, float for the three clipped k = 0 regions."""
    fam, k = id
    L2 = params.L * params.L
    if fam in KITE_FAMILIES_ALL_K:
        return L2 * t_power(4 * k + 1)
    if k == 0:
        return _clipped_area(id, params)
    return L2 * t_power(4 * k - 1)


def generation_area(k: int, params: TilingParams) -> float:
    return sum(to_float(region_area(RegionId(f, k), params)) for f in FAMILIES)


def kite_tail(k_from: int, params: TilingParams) -> QScalar:
    """Exact total area of all generations ``k >= k_from >= 1``."""
    if k_from < 1:
        raise ValueError("tail must start at k >= 1")
    L2 = params.L * params.L
    t4 = t_power(4)
    per_k = 3 * L2 * (t_power(1) + 1 / t_power(1))
    return per_k * t_power(4 * k_from) / (1 - t4)


@dataclass(frozen=True)
class AreaReport:
    kmax: int
    partial_sum: float
    tail: QScalar
    total: float
    disk_area: float
    defect: float
    kite_total: QScalar

    def as_dict(self) -> dict:
        return {
            "kmax": self.kmax,
            "partial_sum": self.partial_sum,
            "tail": to_float(self.tail),
            "tail_exact": str(self.tail),
            "total": self.total,
            "disk_area": self.disk_area,
            "defect": self.defect,
            "kite_total": to_float(self.kite_total),
            "kite_total_exact": str(self.kite_total),
        }


def kite_total(params: TilingParams) -> QScalar:
    """Exact area of every kite of every generation: ``3 t L^2 / (1 - t^2)``."""
    L2 = params.L * params.L
    return 3 * L2 * t_power(1) / (1 - t_power(2))


def tiling_area_check(params: TilingParams) -> AreaReport:
    """Sum region areas to ``kmax``, add the exact tail, compare with pi R^2."""
    if params.kmax < 1:
        raise ValueError("kmax must be at least 1")
    partial = math.fsum(generation_area(k, params) for k in range(params.kmax + 1))
    tail = kite_tail(params.kmax + 1, params)
    total = partial + to_float(tail)
    disk = params.disk_area()
    return AreaReport(
        kmax=params.kmax,
        partial_sum=partial,
        tail=tail,
        total=total,
        disk_area=disk,
        defect=total - disk,
        kite_total=kite_total(params),
    )


# -- vectorised float classification -----------------------------------------


@lru_cache(maxsize=None)
def _float_constraints(fam: str, k: int, L: QScalar):
    params = TilingParams(L)
    out = []
    for line, side in region_constraints(RegionId(fam, k), params):
        out.append((to_float(line.normal.x), to_float(line.normal.y), to_float(line.d), side))
    return tuple(out)


def locate_many(x, y, params: TilingParams, max_depth: int = 80):
    """Float classification of many points.

    Returns ``(family_index, k)`` integer arrays; ``family_index`` is the
    position in ``"ABCDEF"`` or ``-1`` for points outside the disk, on an
    interface, at the origin, or deeper than ``max_depth`` generations.
    Points are processed generation by generation, so the cost is dominated
    by the coarse generations that hold almost all of the area.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fam_idx = np.full(x.shape, -1, dtype=np.int64)
    gen = np.full(x.shape, -1, dtype=np.int64)
    R2 = to_float(params.R2)
    inside = x * x + y * y < R2
    todo = np.flatnonzero(inside.ravel() & ((x != 0) | (y != 0)).ravel())
    xf, yf = x.ravel(), y.ravel()
    fi, gk = fam_idx.ravel(), gen.ravel()
    for k in range(max_depth + 1):
        if todo.size == 0:
            break
        px, py = xf[todo], yf[todo]
        hit_any = np.zeros(todo.size, dtype=bool)
        for j, fam in enumerate(FAMILIES):
            mask = ~hit_any
            for nx, ny, d, side in _float_constraints(fam, k, params.L):
                v = nx * px + ny * py - d
                mask &= (v > 0) if side > 0 else (v < 0)
            idx = todo[mask]
            fi[idx] = j
            gk[idx] = k
            hit_any |= mask
        todo = todo[~hit_any]
        # points outside generation k's reach skip ahead no further; stop
        # once the survivors are all closer to the origin than the next shell
    return fam_idx, gen
