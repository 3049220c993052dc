"""Quantitative properties of the constructed field.

Phase fractions, the generation-0/1 coverage ratio, sup/inf sequences and the
origin limit, growth of the skew gradient, L^p norms of the skew gradient,
the maximum displacement, and the points ``xi_k`` used for the length-scale
argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from .exactnum import ONE, SQRT3, QScalar, t_power, to_float
from .field import WELL_OF, DisplacementField, origin_value, piece, region_vertex_values, vertex_value
from .geometry import (
    CLIPPED_FAMILIES,
    FAMILIES,
    RegionId,
    TilingParams,
    is_kite,
    locate,
    locate_many,
    region_area,
    region_vertices,
    vertex,
)
from .linalg import Vec2
from .wells import decompose, well_index

# -- phase fractions ---------------------------------------------------------


@dataclass(frozen=True)
class PhaseFractionReport:
    areas: tuple  # per-well areas, wells 1..3
    kmax: int
    tail_included: bool
    disk_area: float

    @property
    def fractions(self) -> tuple:
        return tuple(a / self.disk_area for a in self.areas)

    def as_dict(self) -> dict:
        return {
            "kmax": self.kmax,
            "tail_included": self.tail_included,
            "areas": list(self.areas),
            "fractions": list(self.fractions),
            "disk_area": self.disk_area,
            "target": self.disk_area / 3,
        }


def _family_tail(family: str, k_from: int, params: TilingParams) -> QScalar:
    """Exact area of ``omega_{X_k}`` summed over ``k >= k_from >= 1``."""
    L2 = params.L * params.L
    first = L2 * t_power(4 * k_from + 1) if family in "AEF" else L2 * t_power(4 * k_from - 1)
    return first / (1 - t_power(4))


def phase_fractions(f: DisplacementField, kmax: int | None = None, tail: bool = True) -> PhaseFractionReport:
    """Area carrying each well.

    Regions up to ``kmax`` are assigned by reading their symmetric gradient;
    deeper generations follow the same per-family pattern and enter through
    exact geometric tails.
    """
    params = f.params
    kmax = params.kmax if kmax is None else kmax
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    eps = f.eps
    exact = [QScalar(0)] * 3
    numeric = [[], [], []]
    for k in range(kmax + 1):
        for fam in FAMILIES:
            H = piece(fam, k, f).gradient
            w = well_index(decompose(H).dev, eps)
            if w == 0:
                raise ValueError(f"region {fam}{k} carries no well")
            area = region_area(RegionId(fam, k), params)
            if isinstance(area, float):
                numeric[w - 1].append(area)
            else:
                exact[w - 1] = exact[w - 1] + area
    if tail:
        for fam in FAMILIES:
            w = WELL_OF[fam]
            exact[w - 1] = exact[w - 1] + _family_tail(fam, kmax + 1, params)
    areas = tuple(math.fsum([to_float(exact[i])] + numeric[i]) for i in range(3))
    return PhaseFractionReport(areas, kmax, tail, params.disk_area())


@dataclass(frozen=True)
class MonteCarloReport:
    n: int
    seed: int
    counts: tuple  # per well
    unassigned: int
    areas: tuple
    sigmas: tuple

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "counts": list(self.counts),
            "unassigned": self.unassigned,
            "areas": list(self.areas),
            "sigmas": list(self.sigmas),
        }


def phase_fractions_mc(params: TilingParams, n: int = 10_000_000, seed: int = 20130715, chunk: int = 1_000_000) -> MonteCarloReport:
    """Uniform disk sampling through the float classifier."""
    rng = np.random.default_rng(seed)
    R = params.R
    fam_well = np.array([WELL_OF[fm] for fm in FAMILIES])
    counts = np.zeros(3, dtype=np.int64)
    unassigned = 0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        r = R * np.sqrt(rng.random(m))
        th = 2 * np.pi * rng.random(m)
        fam, _ = locate_many(r * np.cos(th), r * np.sin(th), params)
        ok = fam >= 0
        unassigned += int((~ok).sum())
        counts += np.bincount(fam_well[fam[ok]] - 1, minlength=3)
        done += m
    disk = params.disk_area()
    p = counts / n
    areas = tuple(float(v) for v in p * disk)
    sigmas = tuple(float(v) for v in np.sqrt(p * (1 - p) / n) * disk)
    return MonteCarloReport(n, seed, tuple(int(c) for c in counts), unassigned, areas, sigmas)


def area_ratio_k01(params: TilingParams) -> float:
    """``(|omega_0| + 3 |omega_{B_1}|) / (pi R^2)``."""
    w0 = math.fsum(to_float(region_area(RegionId(fm, 0), params)) for fm in FAMILIES)
    b1 = to_float(region_area(RegionId("B", 1), params))
    return (w0 + 3 * b1) / params.disk_area()


def area_beyond_k01(params: TilingParams) -> QScalar:
    """Exact area not counted by :func:`area_ratio_k01`."""
    total = QScalar(0)
    for fam in "AEF":
        total = total + _family_tail(fam, 1, params)
    for fam in "BCD":
        total = total + _family_tail(fam, 2, params)
    return total


# -- sup/inf sequences and the origin limit ----------------------------------


def _arc_angles(p: Vec2, q: Vec2) -> tuple[float, float]:
    """Start angle and (positive) span of the minor arc from ``p`` to ``q``."""
    a = math.atan2(to_float(p.y), to_float(p.x))
    b = math.atan2(to_float(q.y), to_float(q.x))
    span = (b - a) % (2 * math.pi)
    if span > math.pi:
        a, span = b, 2 * math.pi - span
    return a, span


def _in_arc(phi: float, start: float, span: float) -> bool:
    return (phi - start) % (2 * math.pi) <= span


def arc_component_extrema(id: RegionId, f: DisplacementField) -> tuple[Vec2, Vec2]:
    """Componentwise (max, min) of ``u`` on the circular rim of a clipped region.

    ``u_i(theta) = R (g_i1 cos theta + g_i2 sin theta) + c_i`` peaks at
    ``theta = atan2(g_i2, g_i1)`` if that lies on the arc, else at an end.
    """
    if is_kite(id):
        raise ValueError(f"{id} has no circular rim")
    _, p, q = region_vertices(id, f.params)
    start, span = _arc_angles(p, q)
    G, c = piece(id.family, id.k, f.to_float())
    R = f.params.R
    hi, lo = [], []
    for (g1, g2), ci in zip(G.rows(), (c.x, c.y)):
        ends = [R * (g1 * math.cos(t) + g2 * math.sin(t)) + ci for t in (start, start + span)]
        amp = math.hypot(g1, g2)
        phi = math.atan2(g2, g1)
        hi.append(ci + R * amp if _in_arc(phi, start, span) else max(ends))
        lo.append(ci - R * amp if _in_arc(phi + math.pi, start, span) else min(ends))
    return Vec2(*hi), Vec2(*lo)


@dataclass(frozen=True)
class Extrema:
    k: int
    M: Vec2
    m: Vec2
    vertex_M: Vec2
    vertex_m: Vec2


def extrema_sequences(f: DisplacementField, k: int, include_arcs: bool = True) -> Extrema:
    """``sup`` and ``inf`` of each component of ``u`` over ``omega_k``.

    Affine pieces attain their extrema on the region boundary.  For kites
    that is the vertex set; the clipped ``k = 0`` regions also have a circular
    rim, whose extrema are added when ``include_arcs`` is set (they exceed the
    vertex values).  ``vertex_M``/``vertex_m`` keep the vertex-only values.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    vals = []
    for fam in FAMILIES:
        vals.extend(region_vertex_values(RegionId(fam, k), f))
    vM = Vec2(max(v.x for v in vals), max(v.y for v in vals))
    vm = Vec2(min(v.x for v in vals), min(v.y for v in vals))
    M, m = vM, vm
    if include_arcs and k == 0:
        xs_hi, ys_hi = [to_float(M.x)], [to_float(M.y)]
        xs_lo, ys_lo = [to_float(m.x)], [to_float(m.y)]
        for fam in CLIPPED_FAMILIES:
            hi, lo = arc_component_extrema(RegionId(fam, 0), f)
            xs_hi.append(hi.x)
            ys_hi.append(hi.y)
            xs_lo.append(lo.x)
            ys_lo.append(lo.y)
        M = Vec2(max(xs_hi), max(ys_hi))
        m = Vec2(min(xs_lo), min(ys_lo))
    return Extrema(k, M, m, vM, vm)


@dataclass(frozen=True)
class ConvergenceReport:
    ks: tuple
    distances: tuple  # max over vertex families of |u(X_k) - u(0)|
    constants: tuple  # distance / (k t^(2k))
    C: float

    def as_dict(self) -> dict:
        return {"ks": list(self.ks), "distances": list(self.distances), "C": self.C}


def origin_convergence(f: DisplacementField, kmax: int = 25, families: str = FAMILIES) -> ConvergenceReport:
    """Distance of vertex values to the origin value, with fitted ``C``."""
    lim = origin_value(f)
    ks, ds, cs = [], [], []
    for k in range(1, kmax + 1):
        d = 0.0
        for fam in families:
            diff = vertex_value(fam, k, f) - lim
            d = max(d, math.sqrt(to_float(diff.norm2())))
        ks.append(k)
        ds.append(d)
        cs.append(d / (k * to_float(t_power(2 * k))))
    return ConvergenceReport(tuple(ks), tuple(ds), tuple(cs), max(cs))


# -- skew growth and L^p norms -------------------------------------------------


def skew_entry(id: RegionId, f: DisplacementField):
    """``(grad u_skew)_12 = (H12 - H21) / 2`` on a region."""
    H = piece(id.family, id.k, f).gradient
    return H.skew().a12


@dataclass(frozen=True)
class GrowthReport:
    ks: tuple
    per_family: dict  # family -> tuple of |skew_12| per k
    max_per_k: tuple
    slope: float
    c1: float | None
    c2: float
    bounds_hold: bool

    def as_dict(self) -> dict:
        return {
            "ks": list(self.ks),
            "max_per_k": [to_float(v) for v in self.max_per_k],
            "slope": self.slope,
            "c1": self.c1,
            "c2": self.c2,
            "bounds_hold": self.bounds_hold,
        }


def growth_constants(f: DisplacementField) -> tuple[float | None, float]:
    """``c1 k <= |skew_12| <= c2 k`` for ``k >= 1``.

    ``c1 = sqrt3 eps``, ``c2 = 2 sqrt3 eps``; a rigid rotation ``z1`` shifts
    every skew entry, which costs ``|z1|`` on both sides.
    """
    eps = to_float(f.eps)
    z1 = abs(to_float(f.rigid[0])) if f.rigid is not None else 0.0
    c1 = math.sqrt(3) * eps - z1
    return (c1 if c1 > 0 else None), 2 * math.sqrt(3) * eps + z1


def growth_report(f: DisplacementField, kmax: int = 20) -> GrowthReport:
    ks = tuple(range(1, kmax + 1))
    per = {fam: tuple(abs(skew_entry(RegionId(fam, k), f)) for k in ks) for fam in FAMILIES}
    mx = tuple(max(per[fam][i] for fam in FAMILIES) for i in range(len(ks)))
    mxf = np.array([to_float(v) for v in mx])
    slope = float(np.polyfit(np.array(ks, dtype=float), mxf, 1)[0]) if len(ks) > 1 else float("nan")
    c1, c2 = growth_constants(f)
    hold = True
    for fam in FAMILIES:
        for k, v in zip(ks, per[fam]):
            v = to_float(v)
            if v > c2 * k * (1 + 1e-15) or (c1 is not None and v < c1 * k * (1 - 1e-15)):
                hold = False
    return GrowthReport(ks, per, mx, slope, c1, c2, hold)


@dataclass(frozen=True)
class LpNorm:
    p: float
    kmax: int
    partial: float
    tail_bound: float
    terms: tuple  # per-generation contributions

    def as_dict(self) -> dict:
        return {"p": self.p, "kmax": self.kmax, "partial": self.partial, "tail_bound": self.tail_bound}


def _tail_bound(p: float, kmax: int, c2: float, L2: float) -> float:
    """Upper bound of ``sum_{k > kmax} (c2 k)^p 3 L^2 t^(4k) (t + 1/t)``."""
    t = to_float(t_power(1))
    t4 = t**4

    def term(k):
        return (c2 * k) ** p * 3 * L2 * t4**k * (t + 1 / t)

    K = kmax + 1
    while ((K + 1) / K) ** p * t4 >= 0.5:
        K += 1
    s = math.fsum(term(k) for k in range(kmax + 1, K + 1))
    rho = ((K + 1) / K) ** p * t4
    # terms beyond K shrink at least geometrically with ratio rho
    return (s + term(K) * rho / (1 - rho)) * (1 + 1e-12)


def grad_lp_norm(f: DisplacementField, p: float, kmax: int = 40) -> LpNorm:
    """``sum_regions |skew_12|^p * area`` up to ``kmax`` plus a tail bound.

    The integrand is constant on each region, so each term is exact up to
    the float conversion (clipped ``k = 0`` areas are numeric).
    """
    if not p >= 1:
        raise ValueError("p must be at least 1")
    terms = []
    for k in range(kmax + 1):
        parts = []
        for fam in FAMILIES:
            rid = RegionId(fam, k)
            s = abs(to_float(skew_entry(rid, f)))
            parts.append(s**p * to_float(region_area(rid, f.params)))
        terms.append(math.fsum(parts))
    _, c2 = growth_constants(f)
    L2 = to_float(f.params.L * f.params.L)
    return LpNorm(p, kmax, math.fsum(terms), _tail_bound(p, kmax, c2, L2), tuple(terms))


# -- maximum displacement ----------------------------------------------------


def _arc_abs_max(id: RegionId, f: DisplacementField) -> float:
    """max of ``|u|`` over the rim arc of a clipped region."""
    _, p, q = region_vertices(id, f.params)
    start, span = _arc_angles(p, q)
    G, c = piece(id.family, id.k, f.to_float())
    R = f.params.R
    g = np.array([[G.a11, G.a12], [G.a21, G.a22]])
    cv = np.array([c.x, c.y])

    def neg_norm2(th):
        v = R * (g @ np.array([math.cos(th), math.sin(th)])) + cv
        return -float(v @ v)

    ths = start + span * np.linspace(0.0, 1.0, 2049)
    P = R * np.stack([np.cos(ths), np.sin(ths)])
    vals = ((g @ P + cv[:, None]) ** 2).sum(axis=0)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo = ths[max(i - 1, 0)]
    hi = ths[min(i + 1, len(ths) - 1)]
    if hi > lo:
        res = minimize_scalar(neg_norm2, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        best = max(best, -res.fun)
    return math.sqrt(best)


def _max_abs_u_direct(f: DisplacementField, kmax: int = 40) -> tuple[float, str]:
    """Largest ``|u|`` over the closed disk and where it occurs.

    ``|u|`` is convex on each affine piece, so on kites it peaks at a corner;
    clipped regions add their circular rim.
    """
    best, where = math.sqrt(to_float(origin_value(f).norm2())), "origin"
    for k in range(kmax + 1):
        for fam in FAMILIES:
            rid = RegionId(fam, k)
            for v in region_vertex_values(rid, f):
                a = math.sqrt(to_float(v.norm2()))
                if a > best:
                    best, where = a, f"vertex of {rid}"
    for fam in CLIPPED_FAMILIES:
        rid = RegionId(fam, 0)
        a = _arc_abs_max(rid, f)
        if a > best:
            best, where = a, f"rim of {rid}"
    return best, where


@lru_cache(maxsize=None)
def _unit_max() -> tuple[float, str]:
    return _max_abs_u_direct(DisplacementField(TilingParams(ONE), ONE))


def max_displacement(f: DisplacementField, direct: bool = False) -> float:
    """``max |u|`` over the closed disk.

    Without a rigid motion ``u`` is homogeneous, ``u_{L,eps}(p) = eps L u_{1,1}(p/L)``,
    so the value is ``eps L`` times the unit-field maximum (computed once).
    ``direct=True`` evaluates the given field itself.
    """
    if direct or f.rigid is not None:
        return _max_abs_u_direct(f)[0]
    return to_float(f.eps) * to_float(f.L) * _unit_max()[0]


def max_displacement_location() -> str:
    return _unit_max()[1]


# -- continuum-validity length scale -----------------------------------------


@dataclass(frozen=True)
class XiPoint:
    k: int
    point: Vec2
    region: RegionId
    distance: float
    equidistant: bool


def xi_point(k: int, params: TilingParams) -> XiPoint:
    """Midpoint of ``B_k`` and ``B_{k+1}``; it lies on the diagonal of ``omega_{B_{k+1}}``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    b0, b1 = vertex("B", k, params), vertex("B", k + 1, params)
    xi = (b0 + b1) / 2
    loc = locate(xi, params)
    eq = (xi - b0).norm2() == (xi - b1).norm2()
    return XiPoint(k, xi, loc.region, math.sqrt(to_float(xi.norm2())), eq)


def xi_closed_form(k: int, params: TilingParams) -> Vec2:
    """``L t^(2k) (5/sqrt3 - 3, 3 - 5/sqrt3)``."""
    s = params.L * t_power(2 * k)
    return Vec2(s * (5 / SQRT3 - 3), s * (3 - 5 / SQRT3))
