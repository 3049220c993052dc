"""Rank-one compatibility across interfaces.

A continuous piecewise-affine map with gradients ``H+`` and ``H-`` on either
side of a straight interface with unit normal ``n`` needs
``H+ - H- = a (x) n``.  This module checks that condition exactly, solves it
for the free skew parameter of one side, and sweeps the whole tiling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

from .exactnum import ONE, ZERO, to_float
from .field import DisplacementField, piece
from .geometry import INTERFACE_KINDS, InterfaceId, interface
from .linalg import Mat2, Vec2

FLOAT_TOL = 1e-12


class NoSolutionError(ValueError):
    pass


class JumpSolution(NamedTuple):
    """``a (x) n`` with ``W = eps [[0, -w], [w, 0]]`` on the minus side."""

    a: Vec2
    n: Vec2
    w: object

    def jump(self) -> Mat2:
        return Mat2.outer(self.a, self.n)


def _is_zero(x, tol=FLOAT_TOL) -> bool:
    if isinstance(x, float):
        return abs(x) <= tol
    return x == 0


def rank_one_defect(Hp: Mat2, Hm: Mat2):
    """``det(H+ - H-)``; zero iff the two gradients are rank-one connected."""
    return (Hp - Hm).det()


def _check_unit(n: Vec2):
    if not _is_zero(n.norm2() - 1):
        raise ValueError(f"normal {n} is not a unit vector")


def solve_jump(E_plus: Mat2, skew_plus: Mat2, E_minus: Mat2, n: Vec2, eps=ONE) -> JumpSolution:
    """Find ``w`` and ``a`` with ``E+ + S+ - E- - W(w) = a (x) n`` for the given ``n``.

    Writing ``J(w) = M0 - w eps P`` with ``P = [[0, -1], [1, 0]]``, the
    condition ``J n_perp = 0`` fixes ``w = -n . (M0 n_perp) / eps`` and needs
    ``n_perp . M0 n_perp = 0``; then ``a = J n``.
    """
    _check_unit(n)
    M0 = E_plus + skew_plus - E_minus
    n_perp = n.perp()
    if not _is_zero(n_perp.dot(M0 @ n_perp)):
        raise NoSolutionError(f"no skew part makes the jump rank-one with normal {n}")
    w = -n.dot(M0 @ n_perp) / eps
    J = M0 - Mat2.skew_of(w) * eps
    a = J @ n
    sol = JumpSolution(a, n, w)
    diff = sol.jump() - J
    if not all(_is_zero(x) for x in diff.entries()):  # pragma: no cover - algebraic identity
        raise NoSolutionError("reconstruction failed")
    return sol


def _canonical(n: Vec2) -> Vec2:
    if n.y < 0 or (_is_zero(n.y) and n.x < 0):
        return -n
    return n


def candidate_normals(E_plus: Mat2, skew_plus: Mat2, E_minus: Mat2) -> list[Vec2]:
    """Unit normals (``n2 > 0``, or ``n = (1, 0)``) admitting a solution.

    Solves ``S11 m1^2 + 2 S12 m1 m2 + S22 m2^2 = 0`` for the interface
    direction ``m`` with ``S`` the symmetric part of ``E+ + S+ - E-``; the
    roots must be exact in Q(sqrt 3).
    """
    S = (E_plus + skew_plus - E_minus).sym()
    a, b, c = S.a11, 2 * S.a12, S.a22
    if all(_is_zero(x) for x in (a, b, c)):
        raise NoSolutionError("jump is skew for every normal; normal is not determined")
    dirs = []
    if _is_zero(a):
        # m2 = 0 is a root, the other solves b m1 + c m2 = 0
        dirs.append(Vec2(ONE, ZERO))
        if not _is_zero(b):
            dirs.append(Vec2(-c / b, ONE))
    else:
        disc = b * b - 4 * a * c
        if disc < 0:
            raise NoSolutionError("symmetric jump is definite: no rank-one connection")
        root = disc.sqrt()
        for sgn in (1, -1):
            dirs.append(Vec2((-b + sgn * root) / (2 * a), ONE))
    out = []
    for m in dirs:
        norm = m.norm2().sqrt()
        m = m / norm
        n = _canonical(Vec2(m.y, -m.x))
        if n not in out:
            out.append(n)
    return out


def enumerate_jumps(E_plus: Mat2, skew_plus: Mat2, E_minus: Mat2, eps=ONE) -> list[JumpSolution]:
    """All branch solutions, one per admissible normal."""
    return [solve_jump(E_plus, skew_plus, E_minus, n, eps) for n in candidate_normals(E_plus, skew_plus, E_minus)]


@dataclass(frozen=True)
class InterfaceCheck:
    id: InterfaceId
    det: object
    hadamard: bool
    collinear: bool
    a: Vec2
    n: Vec2
    residual: float

    @property
    def ok(self) -> bool:
        return _is_zero(self.det) and self.hadamard and self.collinear

    def as_dict(self) -> dict:
        return {
            "interface": str(self.id),
            "kind": self.id.kind,
            "k": self.id.k,
            "det": self.det,
            "hadamard": self.hadamard,
            "collinear": self.collinear,
            "residual": self.residual,
            "status": "pass" if self.ok else "fail",
        }


@dataclass(frozen=True)
class CompatReport:
    kmax: int
    checks: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "kmax": self.kmax,
            "n_checks": len(self.checks),
            "n_failures": len(self.failures),
            "failures": [str(c.id) for c in self.failures],
        }


def factor_rank_one(J: Mat2) -> Optional[tuple[Vec2, Vec2]]:
    """``(c, r)`` with ``J = c (x) r`` using the larger-norm column as ``c``.

    Returns None for the zero matrix; raises if ``J`` is not rank one.
    """
    cols = [J.column(0), J.column(1)]
    n0, n1 = (to_float(c.norm2()) for c in cols)
    j = 0 if n0 >= n1 else 1
    c = cols[j]
    if _is_zero(c.norm2()):
        return None
    # J e_i = r_i c; read r_i off the column via projection
    cn = c.norm2()
    r = Vec2(cols[0].dot(c) / cn, cols[1].dot(c) / cn)
    if not all(_is_zero(x) for x in (Mat2.outer(c, r) - J).entries()):
        raise ValueError("matrix is not rank one")
    return c, r


def check_interface(id: InterfaceId, f: DisplacementField) -> InterfaceCheck:
    seg = interface(id, f.params)
    Hp = piece(seg.plus.family, seg.plus.k, f).gradient
    Hm = piece(seg.minus.family, seg.minus.k, f).gradient
    J = Hp - Hm
    det = J.det()
    n = seg.normal
    if f.is_float:
        n = Vec2(*n.to_float())
    a = J @ n
    diff = Mat2.outer(a, n) - J
    hadamard = all(_is_zero(x) for x in diff.entries())
    residual = max(abs(to_float(x)) for x in diff.entries())
    collinear = hadamard
    try:
        fr = factor_rank_one(J)
    except ValueError:
        collinear = False
    else:
        if fr is not None:
            collinear = collinear and _is_zero(fr[1].cross(n))
    return InterfaceCheck(id, det, hadamard, collinear, a, n, residual)


def verify_tiling(f: DisplacementField, kmax: int) -> CompatReport:
    """Check every interface of generations ``0..kmax``; failures are data."""
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    checks = [check_interface(InterfaceId(kind, k), f) for k in range(kmax + 1) for kind in INTERFACE_KINDS]
    return CompatReport(kmax, checks)


def mutate_skew(f: DisplacementField, family: str = "B", k: int = 0) -> DisplacementField:
    """Field whose gradient on ``omega_{X_k}`` has its skew part negated."""
    H = piece(family, k, f, with_rigid=False).gradient
    return f.with_override(family, k, H.sym() - H.skew())
