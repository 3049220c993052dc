"""Command line front end: ``tripole {verify,grid,profile,jump,areas,report}``.

Exit codes: 0 success, 1 usage or configuration error, 2 verification failure
(or a jump system without solution).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import compat, report
from .exactnum import QScalar, as_exact, to_float
from .field import DisplacementField
from .geometry import TilingParams
from .linalg import Mat2, Vec2
from .wells import LandauParams, wells

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _exact(text: str, what: str) -> QScalar:
    try:
        return as_exact(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad {what} {text!r}: {exc}") from None


def _vector(text: str, n: int, what: str) -> tuple:
    parts = [p for p in text.split(",")]
    if len(parts) != n:
        raise UsageError(f"{what} needs {n} comma-separated values, got {text!r}")
    return tuple(_exact(p.strip(), what) for p in parts)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--L", default="1", help="length scale (exact expression, e.g. 1, 0.07, 2/3)")
    p.add_argument("--epsilon", default="1", help="transformation strain eps (exact expression)")
    p.add_argument("--kmax", type=int, default=8, help="deepest generation to process")
    p.add_argument("--grid", type=int, default=256, help="grid points per side")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="output format")
    p.add_argument("--rigid", default=None, metavar="Z1,Z2,Z3", help="rigid motion added to the field")
    p.add_argument("--params", default=None, metavar="FILE", help="Landau parameters, key = value lines")
    p.add_argument("--backend", choices=("exact", "float"), default=None)
    p.add_argument("--out", default=None, metavar="PATH", help="write output here instead of stdout")
    p.add_argument("--mutate", choices=("skew-B0",), default=None, help=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tripole", description="Exact tripole-star microstructure: construction and checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run the exact verification suite (JSON report)")
    _common(p)
    p.add_argument("--mc-samples", type=int, default=0, help="add a Monte-Carlo phase-fraction estimate")

    p = sub.add_parser("grid", help="sample u and strains on a square grid")
    _common(p)

    p = sub.add_parser("profile", help="strains along a segment, linear and nonlinear")
    _common(p)
    p.add_argument("--from", dest="start", default="-19/20,1/2", metavar="X,Y", help="start point (scaled by L)")
    p.add_argument("--to", dest="end", default="19/20,1/2", metavar="X,Y", help="end point (scaled by L)")
    p.add_argument("--samples", type=int, default=101)

    p = sub.add_parser("jump", help="solve the rank-one jump between two wells")
    _common(p)
    p.add_argument("--plus", type=int, choices=(1, 2, 3), default=3, help="well on the plus side")
    p.add_argument("--minus", type=int, choices=(1, 2, 3), default=1, help="well on the minus side")
    p.add_argument("--skew-plus", default="0", help="w+ with plus-side skew eps [[0, -w+], [w+, 0]]")
    p.add_argument("--normal", default=None, metavar="N1,N2", help="unit normal, e.g. -sqrt3/2,1/2")
    p.add_argument("--enumerate", action="store_true", help="list every admissible normal")

    p = sub.add_parser("areas", help="tiling areas, phase fractions and coverage ratio")
    _common(p)

    p = sub.add_parser("report", help="verification plus every summary (JSON)")
    _common(p)
    return parser


def _config(args) -> dict:
    L = _exact(args.L, "L")
    eps = _exact(args.epsilon, "epsilon")
    if L.sign() <= 0 or eps.sign() <= 0:
        raise UsageError("L and epsilon must be positive")
    if args.kmax < 0:
        raise UsageError("kmax must be non-negative")
    if args.grid < 2:
        raise UsageError("grid must be at least 2")
    rigid = _vector(args.rigid, 3, "rigid") if args.rigid else None
    try:
        landau = LandauParams.from_file(args.params) if args.params else LandauParams()
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read Landau parameters: {exc}") from None
    return {"L": L, "eps": eps, "rigid": rigid, "landau": landau}


def _config_dict(args, cfg) -> dict:
    d = {
        "command": args.command,
        "L": str(cfg["L"]),
        "epsilon": str(cfg["eps"]),
        "kmax": args.kmax,
        "grid": args.grid,
        "backend": args.backend,
        "rigid": None if cfg["rigid"] is None else [str(z) for z in cfg["rigid"]],
        "landau": vars(cfg["landau"]).copy(),
    }
    if args.mutate:
        d["mutate"] = args.mutate
    return d


def _field(args, cfg, backend: str) -> DisplacementField:
    params = TilingParams(cfg["L"], args.kmax)
    eps = cfg["eps"] if backend == "exact" else to_float(cfg["eps"])
    rigid = cfg["rigid"]
    f = DisplacementField(params, eps, rigid)
    if args.mutate == "skew-B0":
        f = compat.mutate_skew(f, "B", 0)
    return f


def _emit(text: str, args):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _emit_table(args, config, columns, rows):
    if (args.format or "csv") == "json":
        _emit(report.table_json(config, columns, rows), args)
    else:
        _emit(report.csv_text(columns, rows), args)


def cmd_verify(args, cfg) -> int:
    f = _field(args, cfg, "exact")
    res = report.run_verify(f, args.kmax, cfg["landau"], _config_dict(args, cfg), args.mc_samples)
    d = res.as_dict()
    if (args.format or "json") == "csv":
        rows = [(c["name"], c["family"], c["k"], c["status"], c["residual"], c.get("detail", "")) for c in d["checks"]]
        _emit(report.csv_text(("name", "family", "k", "status", "residual", "detail"), rows), args)
    else:
        _emit(report.dumps(d), args)
    summary = d["result"]
    print(
        f"{summary['n_checks']} checks, {summary['n_failures']} failures"
        + (": " + ", ".join(summary["failures"]) if summary["failures"] else ""),
        file=sys.stderr,
    )
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_grid(args, cfg) -> int:
    f = _field(args, cfg, args.backend or "float")
    rows = report.grid_rows(f, args.grid)
    _emit_table(args, _config_dict(args, cfg), report.GRID_COLUMNS, rows)
    return EXIT_OK


def cmd_profile(args, cfg) -> int:
    f = _field(args, cfg, args.backend or "exact")
    a = _vector(args.start, 2, "--from")
    b = _vector(args.end, 2, "--to")
    L = cfg["L"]
    p0, p1 = Vec2(a[0] * L, a[1] * L), Vec2(b[0] * L, b[1] * L)
    if args.samples < 2:
        raise UsageError("samples must be at least 2")
    try:
        samples = report.profile_samples(f, p0, p1, args.samples)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    config = _config_dict(args, cfg)
    config.update({"from": [str(v) for v in a], "to": [str(v) for v in b], "samples": args.samples})
    _emit_table(args, config, report.PROFILE_COLUMNS, report.profile_rows(samples))
    return EXIT_OK


def _jump_row(sol: compat.JumpSolution, eps) -> dict:
    return {
        "w": report.fnum(sol.w),
        "w_exact": report.exact_str(sol.w),
        "a": report.vec_dict(sol.a),
        "a_over_eps": report.vec_dict(sol.a / eps),
        "n": report.vec_dict(sol.n),
    }


def cmd_jump(args, cfg) -> int:
    eps = cfg["eps"]
    W = wells(eps)
    Ep, Em = W[args.plus - 1], W[args.minus - 1]
    Sp = Mat2.skew_of(_exact(args.skew_plus, "skew-plus")) * eps
    try:
        if args.enumerate:
            sols = compat.enumerate_jumps(Ep, Sp, Em, eps)
        else:
            if args.normal is None:
                raise UsageError("give --normal N1,N2 or --enumerate")
            n = Vec2(*_vector(args.normal, 2, "normal"))
            try:
                sols = [compat.solve_jump(Ep, Sp, Em, n, eps)]
            except ValueError as exc:
                if isinstance(exc, compat.NoSolutionError):
                    raise
                raise UsageError(str(exc)) from None
    except compat.NoSolutionError as exc:
        print(f"tripole jump: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rows = [_jump_row(s, eps) for s in sols]
    config = _config_dict(args, cfg)
    config.update({"plus": args.plus, "minus": args.minus, "skew_plus": args.skew_plus})
    if (args.format or "json") == "json":
        _emit(report.dumps({"config": config, "solutions": rows}), args)
    else:
        cols = ("w", "a1", "a2", "n1", "n2", "w_exact", "a1_exact", "a2_exact", "n1_exact", "n2_exact")
        table = [
            (
                r["w"],
                r["a"]["x"],
                r["a"]["y"],
                r["n"]["x"],
                r["n"]["y"],
                r["w_exact"],
                r["a"].get("x_exact", ""),
                r["a"].get("y_exact", ""),
                r["n"].get("x_exact", ""),
                r["n"].get("y_exact", ""),
            )
            for r in rows
        ]
        _emit(report.csv_text(cols, table), args)
    return EXIT_OK


def cmd_areas(args, cfg) -> int:
    if args.kmax < 1:
        raise UsageError("areas needs kmax >= 1")
    f = _field(args, cfg, "exact")
    summary = report.area_summary(f)
    if (args.format or "csv") == "json":
        _emit(report.dumps({"config": _config_dict(args, cfg), **summary}), args)
    else:
        _emit(report.csv_text(report.AREA_COLUMNS, report.area_rows(summary)), args)
    return EXIT_OK


def cmd_report(args, cfg) -> int:
    if args.format == "csv":
        raise UsageError("report is JSON only")
    f = _field(args, cfg, "exact")
    d = report.full_report(f, args.kmax, cfg["landau"], _config_dict(args, cfg))
    _emit(report.dumps(d), args)
    return EXIT_OK if d["result"]["status"] == "pass" else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "grid": cmd_grid,
    "profile": cmd_profile,
    "jump": cmd_jump,
    "areas": cmd_areas,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"tripole {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tripole {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
