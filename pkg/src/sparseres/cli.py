"""Command line front end.

    sparseres mixedvol SYSTEM [--pipeline u|hide --hide-var NAME]
    sparseres matrix SYSTEM --pipeline u|hide [--hide-var NAME] [--matrix-out PATH]
    sparseres solve SYSTEM --pipeline u|hide [--hide-var NAME] [--format json]

Exit codes: 0 ok, 2 parse or usage error, 3 degenerate or singular input,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .poly import PolySystem, add_u_polynomial, hide_variable
from .polytope import DegenerateDeltaError
from .resultant import MatrixConstructionError, build_matrix, degree_report, export_matrix, mixed_volumes_minus
from .solver import (NumericFailure, SingularSystemError, SolveResult, SolverConfig, partition, solve_hidden,
                     solve_u)
from .subdivision import NonGenericLiftingError, mixed_volume, stable_mixed_volume
from .sysio import ParseError, read_system

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_NUMERIC = 4

log = logging.getLogger("sparseres")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    seed: int = 0
    pipeline: str | None = None
    hide_var: str | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    format: str = "text"
    matrix_out: str | None = None


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("thresholds must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="polynomial system file")
    common.add_argument("--pipeline", choices=("u", "hide"))
    common.add_argument("--hide-var", metavar="NAME")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--pivot-tol", type=_positive, default=linalg.DEFAULT_PIVOT_TOL)
    common.add_argument("--cond-route", type=_positive, default=linalg.DEFAULT_COND_ROUTE)
    common.add_argument("--accept-tol", type=_positive, default=1e-6)
    common.add_argument("--reject-tol", type=_positive, default=1e-2)
    common.add_argument("--u-coeffs", metavar="C1,C2,...",
                        help="fix the linear coefficients of the u-polynomial")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--matrix-out", metavar="PATH")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sparseres", description="Sparse resultant polynomial solver.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("mixedvol", parents=[common], help="mixed volume, stable mixed volume and Bezout bound")
    sub.add_parser("matrix", parents=[common], help="build and export a resultant matrix")
    sub.add_parser("solve", parents=[common], help="find all toric roots")
    return parser


def _config(args) -> RunConfig:
    u_coeffs = None
    if args.u_coeffs:
        try:
            u_coeffs = tuple(Fraction(c.strip()) for c in args.u_coeffs.split(","))
        except ValueError:
            raise UsageError(f"bad --u-coeffs value {args.u_coeffs!r}") from None
    try:
        solver = SolverConfig(pivot_tol=args.pivot_tol, cond_route=args.cond_route, accept_tol=args.accept_tol,
                              reject_tol=args.reject_tol, u_coeffs=u_coeffs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.pipeline == "hide" and not args.hide_var:
        raise UsageError("--pipeline hide needs --hide-var")
    if args.hide_var and args.pipeline != "hide":
        raise UsageError("--hide-var only applies to --pipeline hide")
    return RunConfig(args.command, args.input, args.seed, args.pipeline, args.hide_var, solver, args.format,
                     args.matrix_out)


def _overconstrained(sys_: PolySystem, cfg: RunConfig) -> PolySystem:
    if cfg.pipeline == "u":
        return add_u_polynomial(sys_, seed=cfg.seed, S=cfg.solver.S, coeffs=cfg.solver.u_coeffs)
    if cfg.pipeline == "hide":
        return hide_variable(sys_, _var_index(sys_, cfg.hide_var))
    if sys_.is_overconstrained():
        return sys_
    raise UsageError("a square system needs --pipeline u or --pipeline hide")


def _var_index(sys_: PolySystem, name: str) -> int:
    try:
        return sys_.var_index(name)
    except KeyError:
        raise UsageError(f"unknown variable {name!r}; variables are {', '.join(sys_.names)}") from None


def _check_u_coeffs(sys_: PolySystem, cfg: RunConfig) -> None:
    if cfg.solver.u_coeffs is not None and len(cfg.solver.u_coeffs) != sys_.n_vars:
        raise UsageError("--u-coeffs needs one coefficient per variable")


def _complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# --------------------------------------------------------------------------
# commands

def cmd_mixedvol(sys_: PolySystem, cfg: RunConfig) -> dict:
    report: dict = {"n": sys_.n_vars, "polynomials": len(sys_)}
    if sys_.is_well_constrained():
        sup = sys_.supports()
        report["mixed_volume"] = mixed_volume(sup, seed=cfg.seed)
        report["stable_mixed_volume"] = stable_mixed_volume(sup, seed=cfg.seed)
        report["bezout"] = sys_.bezout_bound()
    if cfg.pipeline or sys_.is_overconstrained():
        over = _overconstrained(sys_, cfg)
        mvs = mixed_volumes_minus(over.supports(), seed=cfg.seed)
        report["mv_minus"] = {lab: mv for lab, mv in zip(over.labels, mvs)}
        report["resultant_degree"] = int(sum(mvs))
    if not sys_.is_well_constrained() and not sys_.is_overconstrained():
        raise UsageError(f"{len(sys_)} polynomials in {sys_.n_vars} variables: expected n or n+1")
    return report


def cmd_matrix(sys_: PolySystem, cfg: RunConfig) -> dict:
    over = _overconstrained(sys_, cfg)
    M = build_matrix(over, seed=cfg.seed, max_attempts=cfg.solver.max_attempts)
    dr = degree_report(M, check=False)
    report = {
        "dimension": M.size,
        "row_counts": {lab: c for lab, c in zip(over.labels, M.row_counts())},
        "mv_minus": {lab: c for lab, c in zip(over.labels, dr.mv_minus)},
        "resultant_degree": dr.resultant_degree,
        "degree_report_ok": dr.ok,
        "hidden_columns": len(M.hidden_columns()),
        "hidden_degree": M.degree,
        "attempts": M.attempts,
    }
    if M.is_polynomial():
        P = partition(M, cfg.solver.pivot_tol, cfg.solver.cond_route)
        report.update(m11_size=P.k, pencil_size=P.r, kappa_m11=P.kappa if P.k else None,
                      whole_matrix=P.whole)
    if cfg.matrix_out:
        export_matrix(M, cfg.matrix_out)
        report["matrix_out"] = cfg.matrix_out
    return report


def solve_report(res: SolveResult, cfg: RunConfig) -> dict:
    roots = []
    for c in res.candidates:
        roots.append({
            "coordinates": [_complex(z) for z in c.coordinates],
            "residuals": [float(r) for r in c.residuals],
            "residual": c.residual,
            "eigenvalue": _complex(c.eigenvalue),
            "multiplicity": c.multiplicity,
            "geometric_multiplicity": c.geometric_multiplicity,
            "status": c.status,
            "real": c.is_real,
            "recovery": c.recovery,
        })
    order = {"accepted": 0, "ambiguous": 1, "multiplicity-degenerate": 2, "rejected": 3}
    roots.sort(key=lambda r: (order[r["status"]], r["residual"]))
    diag = {k: v for k, v in res.diagnostics.items()}
    return {
        "names": list(res.names),
        "pipeline": cfg.pipeline,
        "seed": cfg.seed,
        "roots": roots,
        "discarded": res.discarded,
        "diagnostics": diag,
        "timing": {"offline": res.timings["offline"], "online": res.timings["online"]},
    }


def cmd_solve(sys_: PolySystem, cfg: RunConfig) -> dict:
    if cfg.pipeline is None:
        raise UsageError("solve needs --pipeline u or --pipeline hide")
    if not sys_.is_well_constrained():
        raise UsageError(f"{len(sys_)} polynomials in {sys_.n_vars} variables: solve needs a square system")
    if cfg.pipeline == "u":
        res = solve_u(sys_, seed=cfg.seed, config=cfg.solver)
    else:
        res = solve_hidden(sys_, _var_index(sys_, cfg.hide_var), seed=cfg.seed, config=cfg.solver)
    return solve_report(res, cfg)


# --------------------------------------------------------------------------
# output

def _fmt_point(xs) -> str:
    parts = []
    for re_, im in xs:
        parts.append(f"{re_:.10g}" if abs(im) <= 1e-12 * max(1.0, abs(re_)) else f"{re_:.10g}{im:+.10g}j")
    return "(" + ", ".join(parts) + ")"


def format_text(command: str, report: dict) -> str:
    lines = []
    if command == "solve":
        d = report["diagnostics"]
        lines.append(f"pipeline {report['pipeline']}: matrix {d['matrix_size']}, M11 {d['m11_size']}, "
                     f"pencil {d['pencil_size']} (degree {d['degree']}), route {d['route']}")
        lines.append("counts: " + ", ".join(f"{k} {v}" for k, v in d["counts"].items()))
        for r in report["roots"]:
            if r["status"] == "rejected":
                continue
            lines.append(f"{r['status']:>24}  residual {r['residual']:.2e}  "
                         f"{', '.join(report['names'])} = {_fmt_point(r['coordinates'])}")
        lines.append(f"discarded {len(report['discarded'])}; offline {report['timing']['offline']:.3f}s, "
                     f"online {report['timing']['online']:.3f}s")
    else:
        for k, v in report.items():
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        sys_ = read_system(cfg.input)
        _check_u_coeffs(sys_, cfg)
        command = {"mixedvol": cmd_mixedvol, "matrix": cmd_matrix, "solve": cmd_solve}[cfg.command]
        report = command(sys_, cfg)
    except (ParseError, UsageError) as exc:
        print(f"sparseres: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"sparseres: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SingularSystemError, MatrixConstructionError, DegenerateDeltaError, NonGenericLiftingError) as exc:
        print(f"sparseres: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (NumericFailure, np.linalg.LinAlgError) as exc:
        print(f"sparseres: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.format == "json":
        out.write(json.dumps(report, indent=1, sort_keys=True) + "\n")
    else:
        out.write(format_text(cfg.command, report) + "\n")
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
