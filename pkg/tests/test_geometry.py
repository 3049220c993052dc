"""Tiling geometry: vertices, interfaces, regions, areas and point location."""

import math
from fractions import Fraction

import numpy as np
import pytest
import shapely.geometry as sg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SQ3, T_FLOAT
from tripole.exactnum import ONE, SQRT3, QScalar, t_power, to_float
from tripole.geometry import (
    FAMILIES,
    INTERFACE_KINDS,
    InterfaceId,
    RegionId,
    TilingParams,
    all_interfaces,
    all_regions,
    interface,
    is_kite,
    kite_tail,
    kite_total,
    locate,
    locate_many,
    region_area,
    region_contains,
    region_vertices,
    tiling_area_check,
    vertex,
)
from tripole.linalg import Vec2

P1 = TilingParams(ONE, 8)
P7 = TilingParams(QScalar(Fraction(7, 100)), 8)

# vertex coordinates for L = 1, typed in as floats
BASE = {
    "A": (1 / (2 * SQ3), 0.5 + 1 / SQ3),
    "B": ((1 - SQ3) / (2 * SQ3), -(1 - SQ3) / (2 * SQ3)),
    "C": (SQ3 / 6, 1 / SQ3 - 0.5),
    "D": (0.5 - 1 / SQ3, -1 / (2 * SQ3)),
    "E": ((-2 - SQ3) / (2 * SQ3), -1 / (2 * SQ3)),
    "F": ((1 + SQ3) / (2 * SQ3), -(1 + SQ3) / (2 * SQ3)),
}


def fvec(v):
    return np.array(v.to_float())


def polygon(rid, params, n_arc=4000):
    """Float polygon of a region; clipped rims are densely sampled arcs."""
    vs = [fvec(v) for v in region_vertices(rid, params)]
    if is_kite(rid):
        return sg.Polygon(vs)
    apex, p, q = vs
    a, b = math.atan2(p[1], p[0]), math.atan2(q[1], q[0])
    span = (b - a) % (2 * math.pi)
    if span > math.pi:
        a, span = b, 2 * math.pi - span
    R = params.R
    th = a + span * np.linspace(0, 1, n_arc)
    return sg.Polygon([tuple(apex)] + list(zip(R * np.cos(th), R * np.sin(th))))


@pytest.mark.parametrize("fam", FAMILIES)
@pytest.mark.parametrize("k", [0, 1, 5])
def test_vertices_scale_by_t_squared(fam, k):
    v = vertex(fam, k, P1)
    assert v.to_float() == pytest.approx(tuple(c * T_FLOAT ** (2 * k) for c in BASE[fam]), rel=1e-13)
    assert vertex(fam, k + 1, P1) == v * t_power(2)


def test_rim_vertices_on_circle():
    for fam in "AEF":
        assert vertex(fam, 0, P1).norm2() == P1.R2
    assert P1.R2 == Fraction(2, 3) + 1 / SQRT3


def test_interfaces_join_their_endpoints_and_have_unit_normals():
    for rid in all_interfaces(8):
        seg = interface(rid, P1)
        assert seg.normal.norm2() == 1
        assert seg.line.value(seg.p0) == 0 and seg.line.value(seg.p1) == 0
        assert seg.normal.dot(seg.p1 - seg.p0) == 0


# normals of generation-0 interfaces, up to sign, typed in directly
NORMALS = {
    "BA": (-SQ3 / 2, 0.5),
    "CA": (1.0, 0.0),
    "ED": (0.0, 1.0),
    "BA+": (0.5, SQ3 / 2),
    "AC+": (0.0, 1.0),
    "DE+": (1.0, 0.0),
}


@pytest.mark.parametrize("kind", sorted(NORMALS))
def test_normals(kind):
    n = fvec(interface(InterfaceId(kind, 0), P1).normal)
    ref = np.array(NORMALS[kind])
    assert abs(abs(n @ ref) - 1) < 1e-14


def test_plus_side_lies_where_normal_points():
    for iid in all_interfaces(3):
        seg = interface(iid, P1)
        mid = (seg.p0 + seg.p1) / 2
        h = QScalar(Fraction(1, 10**6)) * t_power(2 * iid.k)
        assert region_contains(mid + seg.normal * h, seg.plus, P1)
        assert region_contains(mid - seg.normal * h, seg.minus, P1)


def _angles(vs):
    out = []
    for i in range(len(vs)):
        a, b, c = vs[i - 1], vs[i], vs[(i + 1) % len(vs)]
        u, w = a - b, c - b
        out.append(math.acos(np.dot(u, w) / np.linalg.norm(u) / np.linalg.norm(w)))
    return sorted(out)


@pytest.mark.parametrize("rid", [r for r in all_regions(3) if is_kite(r)], ids=str)
def test_kite_angles(rid):
    vs = [fvec(v) for v in region_vertices(rid, P1)]
    assert _angles(vs) == pytest.approx(sorted([5 * math.pi / 6, math.pi / 2, math.pi / 2, math.pi / 6]), abs=1e-12)


def test_kites_are_rotated_copies():
    """Rotation by 2 pi/3 about the origin maps A_k onto E_k and F_k (as sets)."""
    c, s = math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)
    Rm = np.array([[c, -s], [s, c]])
    for k in (0, 2):
        a = polygon(RegionId("A", k), P1)
        for fam in "EF":
            other = polygon(RegionId(fam, k), P1)
            for _ in range(3):
                a_rot = sg.Polygon([tuple(Rm @ np.array(p)) for p in a.exterior.coords])
                if a_rot.symmetric_difference(other).area < 1e-12:
                    break
                a = a_rot
            else:
                pytest.fail(f"no rotation maps A{k} onto {fam}{k}")


def test_regions_are_disjoint_and_fill_the_disk():
    polys = {r: polygon(r, P1) for r in all_regions(6)}
    rs = list(polys)
    for i, r in enumerate(rs):
        for s in rs[i + 1 :]:
            assert polys[r].intersection(polys[s]).area < 1e-9 * polys[r].area
    covered = sum(p.area for p in polys.values())
    tail = to_float(kite_tail(7, P1))
    assert covered + tail == pytest.approx(P1.disk_area(), rel=1e-6)  # arc polygon approx


@pytest.mark.parametrize("rid", list(all_regions(4)), ids=str)
def test_region_area_matches_polygon(rid):
    ref = polygon(rid, P1, n_arc=20000).area
    got = to_float(region_area(rid, P1))
    rel = 1e-7 if not is_kite(rid) else 1e-12
    assert got == pytest.approx(ref, rel=rel)


def test_kite_area_closed_forms():
    L2 = ONE
    for k in range(6):
        for fam in "AEF":
            assert region_area(RegionId(fam, k), P1) == L2 * t_power(4 * k + 1)
        if k:
            for fam in "BCD":
                assert region_area(RegionId(fam, k), P1) == L2 * t_power(4 * k - 1)


def test_tiling_area_check_closes():
    rep = tiling_area_check(P1)
    assert abs(rep.defect) < 1e-13
    assert kite_total(P1) == 3 * t_power(1) / (1 - t_power(2))
    # the clipped regions are what remains of the disk
    clipped = sum(to_float(region_area(RegionId(f, 0), P1)) for f in "BCD")
    assert clipped + to_float(kite_total(P1)) == pytest.approx(P1.disk_area(), rel=1e-14)


def test_area_scales_with_L_squared():
    a = tiling_area_check(P7)
    assert a.disk_area == pytest.approx(P1.disk_area() * 0.0049, rel=1e-14)
    assert abs(a.defect) < 1e-13 * 0.0049


def test_locate_examples():
    assert locate(Vec2(QScalar(0), QScalar(0)), P1).kind == "origin"
    assert locate(Vec2(QScalar(2), QScalar(0)), P1).kind == "outside"
    # a vertex-free midpoint of an interface
    seg = interface(InterfaceId("BA", 2), P1)
    loc = locate((seg.p0 + seg.p1) / 2, P1)
    assert loc.kind == "interface" and loc.interface == InterfaceId("BA", 2)
    # kite centroids
    for rid in all_regions(5):
        if is_kite(rid):
            vs = region_vertices(rid, P1)
            c = (vs[0] + vs[1] + vs[2] + vs[3]) / 4
            assert locate(c, P1).region == rid
    # on the rim of B0
    a0 = vertex("A", 0, P1)
    p = Vec2(-a0.x, a0.y)
    assert p.norm2() == P1.R2
    assert locate(p, P1).kind == "boundary"
    assert locate(p, P1).region == RegionId("B", 0)


_coord = st.fractions(min_value=-1, max_value=1, max_denominator=10**6)


@settings(max_examples=300, deadline=None)
@given(_coord, _coord)
def test_locate_region_is_unique(x, y):
    """Every interior point belongs to exactly one region of its bracket."""
    p = Vec2(QScalar(x), QScalar(y))
    loc = locate(p, P1)
    if loc.kind != "region":
        return
    hits = [r for r in all_regions(loc.region.k + 2) if region_contains(p, r, P1)]
    assert hits == [loc.region]


@settings(max_examples=200, deadline=None)
@given(_coord, _coord)
def test_locate_many_agrees_with_exact(x, y):
    p = Vec2(QScalar(x), QScalar(y))
    loc = locate(p, P1)
    fam, k = locate_many(np.array([float(x)]), np.array([float(y)]), P1)
    if loc.kind == "region":
        # floats may only disagree within rounding distance of an interface
        if fam[0] >= 0:
            assert (FAMILIES[fam[0]], int(k[0])) == tuple(loc.region)
    elif loc.kind == "outside":
        assert fam[0] == -1


def test_monte_carlo_b0_area():
    """Uniform sampling of the disk reproduces the clipped B0 area within 4 sigma."""
    rng = np.random.default_rng(7)
    n = 400_000
    R = P1.R
    r = R * np.sqrt(rng.random(n))
    th = 2 * np.pi * rng.random(n)
    fam, k = locate_many(r * np.cos(th), r * np.sin(th), P1)
    p = np.mean((fam == 1) & (k == 0))
    est = p * P1.disk_area()
    sigma = math.sqrt(p * (1 - p) / n) * P1.disk_area()
    assert abs(est - to_float(region_area(RegionId("B", 0), P1))) < 4 * sigma


def test_tiling_params_validation():
    with pytest.raises(ValueError):
        TilingParams(QScalar(-1), 3)
    with pytest.raises(ValueError):
        TilingParams(ONE, -1)
    assert len(INTERFACE_KINDS) == 12
