"""Assembling checks and tables for the command line.

Everything here returns plain data (dicts, lists of rows); :mod:`tripole.cli`
only parses arguments and writes the result out.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analysis, compat
from .exactnum import QScalar, as_exact, to_float
from .field import (
    DisplacementField,
    eval_many,
    interface_trace,
    origin_value,
    piece,
    printed_vertex_value,
    vertex_value,
)
from .geometry import (
    FAMILIES,
    INTERFACE_KINDS,
    InterfaceId,
    RegionId,
    locate,
    tiling_area_check,
    vertex,
)
from .linalg import Mat2, Vec2
from .wells import (
    LandauParams,
    decompose,
    epsilon_of,
    linear_strains,
    nonlinear_strains,
    psi_L,
    m_offset,
    well_index,
)

TRACE_PARAMS = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


# -- value formatting ----------------------------------------------------------


def fnum(x) -> float | None:
    """Float for output; exact values go through the cancellation-free path."""
    if x is None:
        return None
    v = float(to_float(x))
    return v if math.isfinite(v) else None


def exact_str(x) -> str | None:
    if isinstance(x, QScalar):
        return str(x)
    if isinstance(x, (int, Fraction)):
        return str(QScalar(x))
    return None


def vec_dict(v: Vec2) -> dict:
    out = {"x": fnum(v.x), "y": fnum(v.y)}
    if isinstance(v.x, QScalar):
        out["x_exact"], out["y_exact"] = exact_str(v.x), exact_str(v.y)
    return out


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, float) else v) for v in r])
    return buf.getvalue()


def table_json(config: dict, columns, rows) -> str:
    return dumps({"config": config, "columns": list(columns), "rows": [list(r) for r in rows]})


# -- verification suite --------------------------------------------------------


@dataclass
class Check:
    name: str
    family: str
    k: int | None
    ok: bool
    residual: float = 0.0
    exact: str | None = None
    detail: str | None = None

    def as_dict(self) -> dict:
        d = {
            "name": self.name,
            "family": self.family,
            "k": self.k,
            "status": "pass" if self.ok else "fail",
            "residual": self.residual,
        }
        if self.exact is not None:
            d["exact"] = self.exact
        if self.detail is not None:
            d["detail"] = self.detail
        return d


@dataclass
class VerifyResult:
    config: dict
    checks: list = field(default_factory=list)
    summaries: dict = field(default_factory=dict)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "checks": [c.as_dict() for c in self.checks],
            "summaries": self.summaries,
            "result": {
                "n_checks": len(self.checks),
                "n_failures": len(self.failures),
                "status": "pass" if self.ok else "fail",
                "failures": sorted({f"{c.name}:{c.family}{'' if c.k is None else c.k}" for c in self.failures}),
            },
        }


def _vec_residual(a: Vec2, b: Vec2) -> float:
    return max(abs(to_float(a.x - b.x)), abs(to_float(a.y - b.y)))


def _interface_checks(f: DisplacementField, kmax: int) -> list[Check]:
    out = []
    for k in range(kmax + 1):
        for kind in INTERFACE_KINDS:
            iid = InterfaceId(kind, k)
            ic = compat.check_interface(iid, f)
            out.append(Check("rank_one", kind, k, compat._is_zero(ic.det), abs(to_float(ic.det)), exact_str(ic.det)))
            an = f"a=({exact_str(ic.a.x)}, {exact_str(ic.a.y)}) n=({exact_str(ic.n.x)}, {exact_str(ic.n.y)})"
            out.append(Check("hadamard", kind, k, ic.hadamard and ic.collinear, ic.residual, an))
            for s in TRACE_PARAMS:
                tr = interface_trace(iid, s, f)
                out.append(Check("continuity", kind, k, tr.minus == tr.plus, _vec_residual(tr.minus, tr.plus), detail=f"s={s}"))
                out.append(
                    Check("printed_trace", kind, k, tr.printed == tr.minus, _vec_residual(tr.printed, tr.minus), detail=f"s={s}")
                )
    return out


def _region_checks(f: DisplacementField, kmax: int, landau: LandauParams) -> list[Check]:
    out = []
    eps_fig = epsilon_of(landau)
    f_fig = DisplacementField(f.params, eps_fig, f.rigid, tuple((key, G * (eps_fig / to_float(f.eps))) for key, G in f.to_float().overrides))
    M = m_offset(landau)
    for k in range(kmax + 1):
        for fam in FAMILIES:
            H = piece(fam, k, f).gradient
            dec = decompose(H)
            w = well_index(dec.dev, f.eps) if dec.sph == Mat2.zero() else 0
            out.append(Check("well_inclusion", fam, k, w != 0, 0.0 if w else 1.0, detail=f"well={w}"))
            Hf = piece(fam, k, f_fig).gradient
            energy = psi_L(linear_strains(Hf), landau, M)
            out.append(Check("energy", fam, k, abs(energy) <= 1e-12, abs(energy)))
    return out


def _vertex_checks(f: DisplacementField, kmax: int) -> list[Check]:
    out = []
    for k in range(kmax + 1):
        for fam in "ABC":
            a, b = printed_vertex_value(fam, k, f), vertex_value(fam, k, f)
            out.append(Check("vertex_value", fam, k, a == b, _vec_residual(a, b)))
    # the three rim points where three regions meet
    for apex, regions in (("A", "ABC"), ("F", "CFD"), ("E", "DEB")):
        p = vertex(apex, 0, f.params)
        vals = [piece(r, 0, f)(p) for r in regions]
        ok = vals[0] == vals[1] == vals[2]
        res = max(_vec_residual(vals[0], v) for v in vals[1:])
        out.append(Check("triple_point", apex, 0, ok, res, detail="".join(regions)))
    return out


def run_verify(f: DisplacementField, kmax: int, landau: LandauParams, config: dict, mc_samples: int = 0) -> VerifyResult:
    """Exact compatibility, continuity, well and energy checks plus summaries."""
    if f.is_float:
        raise ValueError("verification needs an exact field")
    res = VerifyResult(config)
    res.checks += _interface_checks(f, kmax)
    res.checks += _region_checks(f, kmax, landau)
    res.checks += _vertex_checks(f, kmax)

    conv = analysis.origin_convergence(f, 25)
    # C_k = d_k / (k t^2k) must settle: its last increment is small against C
    within = abs(conv.constants[-1] - conv.constants[-2]) <= 1e-2 * conv.C
    scale = to_float(f.eps) * to_float(f.L)
    res.checks.append(Check("origin_limit", "*", 25, within and conv.distances[-1] <= 1e-12 * scale, conv.distances[-1], detail=f"C={conv.C!r}"))

    pf = analysis.phase_fractions(f, max(kmax, 2))
    target = f.params.disk_area() / 3
    L2 = to_float(f.L * f.L)
    for i, a in enumerate(pf.areas, 1):
        res.checks.append(Check("phase_fraction", f"E{i}", None, abs(a - target) <= 1e-9 * L2, abs(a - target)))
    ratio = analysis.area_ratio_k01(f.params)
    res.checks.append(Check("area_ratio", "*", None, round(ratio, 3) == 0.999, abs(ratio - 0.999)))

    gr = analysis.growth_report(f, 20)
    slope_target = 2 * math.sqrt(3) * to_float(f.eps)
    res.checks.append(Check("skew_growth", "*", None, gr.bounds_hold and abs(gr.slope - slope_target) <= 1e-9, abs(gr.slope - slope_target)))

    lp = {}
    for p in (1, 2, 3, 4):
        a, b = analysis.grad_lp_norm(f, p, 39), analysis.grad_lp_norm(f, p, 40)
        inc = abs(b.partial - a.partial) / b.partial
        rel_tail = b.tail_bound / b.partial
        res.checks.append(Check("lp_norm", f"p={p}", 40, inc < 1e-14 and rel_tail < 1e-12, rel_tail))
        lp[str(p)] = b.as_dict()

    summaries = {
        "phase_fractions": pf.as_dict(),
        "area_ratio": ratio,
        "origin_value": vec_dict(origin_value(f)),
        "origin_convergence_C": conv.C,
        "lp_norms": lp,
        "growth": gr.as_dict(),
        "compat": compat.verify_tiling(f, kmax).as_dict(),
        "epsilon_fig2": epsilon_of(landau),
    }
    if mc_samples:
        summaries["phase_fractions_mc"] = analysis.phase_fractions_mc(f.params, mc_samples).as_dict()
    res.summaries = summaries
    return res


# -- tables --------------------------------------------------------------------

GRID_COLUMNS = ("x", "y", "u1", "u2", "well_index", "eps1", "eps2", "eps3")


def _strain_table(f: DisplacementField):
    """Per-(family, k) float linear strains and well index."""
    cache = {}

    def get(fam: str, k: int):
        key = (fam, k)
        if key not in cache:
            H = piece(fam, k, f).gradient
            s = linear_strains(H)
            w = well_index(decompose(H).dev, f.eps)
            cache[key] = (w, tuple(to_float(v) for v in s))
        return cache[key]

    return get


def grid_rows(f: DisplacementField, n: int) -> list[tuple]:
    """n x n samples of the bounding square of the disk."""
    if n < 2:
        raise ValueError("grid needs at least 2 points per side")
    ff = f.to_float()
    R = f.params.R
    xs = np.linspace(-R, R, n)
    X, Y = np.meshgrid(xs, xs[::-1])
    u1, u2, fam, gen = eval_many(X.ravel(), Y.ravel(), ff)
    strains = _strain_table(ff)
    rows = []
    for x, y, a, b, fi, k in zip(X.ravel(), Y.ravel(), u1, u2, fam, gen):
        if fi >= 0:
            w, (e1, e2, e3) = strains(FAMILIES[fi], int(k))
        else:
            w, e1, e2, e3 = 0, None, None, None
        rows.append((float(x), float(y), fnum(a) if not np.isnan(a) else None, fnum(b) if not np.isnan(b) else None, w, e1, e2, e3))
    return rows


PROFILE_COLUMNS = ("s", "x", "y", "region", "well_index", "eps2", "eps3", "eps1", "e1", "e2", "e3")


@dataclass(frozen=True)
class ProfileSample:
    s: object
    point: Vec2
    region: RegionId | None
    well: int
    linear: tuple | None
    nonlinear: tuple | None


def profile_samples(f: DisplacementField, p0: Vec2, p1: Vec2, n: int) -> list[ProfileSample]:
    """Linear and nonlinear strains along ``p0 -> p1`` (exact when ``f`` is)."""
    if n < 2:
        raise ValueError("profile needs at least 2 samples")
    p0 = Vec2(as_exact(p0.x), as_exact(p0.y))
    p1 = Vec2(as_exact(p1.x), as_exact(p1.y))
    for p in (p0, p1):
        if p.norm2() > f.params.R2:
            raise ValueError(f"profile endpoint {p.to_float()} lies outside the disk")
    out = []
    for i in range(n):
        s = Fraction(i, n - 1)
        p = p0 + (p1 - p0) * s
        loc = locate(p, f.params)
        if loc.kind in ("region", "boundary"):
            rid = loc.region
            H = piece(rid.family, rid.k, f).gradient
            out.append(ProfileSample(s, p, rid, well_index(decompose(H).dev, f.eps), tuple(linear_strains(H)), tuple(nonlinear_strains(H))))
        else:
            out.append(ProfileSample(s, p, None, 0, None, None))
    return out


def profile_rows(samples: list[ProfileSample]) -> list[tuple]:
    rows = []
    for sm in samples:
        lin = sm.linear or (None, None, None)
        nl = sm.nonlinear or (None, None, None)
        rows.append(
            (
                float(sm.s),
                fnum(sm.point.x),
                fnum(sm.point.y),
                str(sm.region) if sm.region else "",
                sm.well,
                fnum(lin[1]),
                fnum(lin[2]),
                fnum(lin[0]),
                fnum(nl[0]),
                fnum(nl[1]),
                fnum(nl[2]),
            )
        )
    return rows


AREA_COLUMNS = ("quantity", "value", "exact")


def area_summary(f: DisplacementField) -> dict:
    rep = tiling_area_check(f.params)
    pf = analysis.phase_fractions(f, max(f.params.kmax, 2))
    ratio = analysis.area_ratio_k01(f.params)
    return {
        "tiling": rep.as_dict(),
        "phase_fractions": pf.as_dict(),
        "area_ratio_k01": ratio,
        "area_beyond_k01": fnum(analysis.area_beyond_k01(f.params)),
        "area_beyond_k01_exact": exact_str(analysis.area_beyond_k01(f.params)),
    }


def area_rows(summary: dict) -> list[tuple]:
    t, pf = summary["tiling"], summary["phase_fractions"]
    rows = [
        ("disk_area", t["disk_area"], ""),
        ("partial_sum", t["partial_sum"], ""),
        ("tail", t["tail"], t["tail_exact"]),
        ("total", t["total"], ""),
        ("defect", t["defect"], ""),
        ("kite_total", t["kite_total"], t["kite_total_exact"]),
    ]
    for i, a in enumerate(pf["areas"], 1):
        rows.append((f"well_{i}_area", a, ""))
    rows.append(("area_ratio_k01", summary["area_ratio_k01"], ""))
    rows.append(("area_beyond_k01", summary["area_beyond_k01"], summary["area_beyond_k01_exact"]))
    return rows


def full_report(f: DisplacementField, kmax: int, landau: LandauParams, config: dict) -> dict:
    v = run_verify(f, kmax, landau, config)
    out = v.as_dict()
    xi = analysis.xi_point(2, f.params)
    ext = [analysis.extrema_sequences(f, k) for k in range(0, 6)]
    out["summaries"].update(
        {
            "areas": area_summary(f),
            "max_displacement": analysis.max_displacement(f),
            "max_displacement_location": analysis.max_displacement_location() if f.rigid is None else None,
            "xi_2": {"point": vec_dict(xi.point), "region": str(xi.region), "distance": xi.distance},
            "extrema": [{"k": e.k, "M": vec_dict(e.M), "m": vec_dict(e.m)} for e in ext],
        }
    )
    return out
