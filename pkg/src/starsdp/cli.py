"""Command-line front end: solve problem files, sample joint numerical
cones, reduce symmetric SDPs.

Exit codes: 0 success, 1 input or parse error, 2 objective or constraint
not representable at the requested level, 3 solver failure, 4 invariance
violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from . import ipm
from .algebra import AlgebraError, normal_form
from .problems import ProblemSyntaxError, parse_problem_file
from .relaxation import (
    RelaxationError, build_relaxation, jnc_family, jnc_support,
)
from .sdpmodel import (
    ModelError, SDPAFormatError, export_sdpa_file, import_sdpa_file,
    to_equality_form,
)
from .symmetry import GroupError, InvarianceError, parse_group_file, reduce_sdp

EXIT_INPUT = 1
EXIT_NOT_REPRESENTABLE = 2
EXIT_SOLVER = 3
EXIT_INVARIANCE = 4


def _err(msg: str) -> None:
    print(f"starsdp: {msg}", file=sys.stderr)


def _parse_levels(spec: str) -> list[int]:
    s = spec.strip()
    if "-" in s[1:]:
        lo, hi = s.split("-", 1)
        levels = list(range(int(lo), int(hi) + 1))
    else:
        levels = [int(s)]
    if not levels or any(l < 0 for l in levels):
        raise ValueError(f"bad level specification {spec!r}")
    return levels


def _fmt_float(x: float) -> str:
    return f"{x:.8f}"


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        problem = parse_problem_file(args.file)
    except (OSError, ProblemSyntaxError, AlgebraError) as e:
        _err(str(e))
        return EXIT_INPUT
    try:
        levels = _parse_levels(args.level) if args.level else [problem.level]
    except ValueError as e:
        _err(str(e))
        return EXIT_INPUT

    options = None
    if args.tol is not None:
        options = ipm.SolverOptions(tol_gap=args.tol, tol_feas=args.tol)

    rows = []
    last_relax = None
    failed = False
    for level in levels:
        t0 = time.perf_counter()
        try:
            relax = build_relaxation(problem, level=level)
        except RelaxationError as e:
            _err(f"level {level}: {e}")
            return EXIT_NOT_REPRESENTABLE
        result = relax.solve(options)
        wall = time.perf_counter() - t0
        last_relax = relax
        rows.append({
            "level": level,
            "basis_size": len(relax.basis),
            "moment_variables": relax.n_moment_vars,
            "bound": result.bound,
            "gap": result.solution.gap,
            "status": result.status.value,
            "wall_time": wall,
        })
        if result.status != ipm.Status.OPTIMAL:
            failed = True

    if args.json:
        print(json.dumps({
            "file": args.file,
            "name": problem.name,
            "sense": problem.sense,
            "levels": rows,
        }, indent=2))
    else:
        header = f"{'level':>5}  {'basis':>5}  {'vars':>5}  {'bound':>14}  " \
                 f"{'gap':>9}  {'status':<10}  {'time':>8}"
        print(header)
        for r in rows:
            print(f"{r['level']:>5}  {r['basis_size']:>5}  "
                  f"{r['moment_variables']:>5}  {_fmt_float(r['bound']):>14}  "
                  f"{r['gap']:>9.2e}  {r['status']:<10}  "
                  f"{r['wall_time']:>7.2f}s")

    if args.export:
        model = last_relax.model
        if not model.is_equality_only():
            model = to_equality_form(model)
        export_sdpa_file(model, args.export)

    if failed:
        _err("solver did not reach an optimal certificate at every level")
        return EXIT_SOLVER
    return 0


def cmd_jnc(args: argparse.Namespace) -> int:
    try:
        problem = parse_problem_file(args.file)
    except (OSError, ProblemSyntaxError, AlgebraError) as e:
        _err(str(e))
        return EXIT_INPUT

    fam = dict(jnc_family(problem))
    names = [t.strip() for t in args.pair.split(",")]
    if len(names) != 2:
        _err(f"--pair wants two comma-separated names, got {args.pair!r}")
        return EXIT_INPUT
    missing = [n for n in names if n not in fam]
    if missing:
        known = ", ".join(fam)
        _err(f"unknown polynomial name {missing[0]!r} (have: {known})")
        return EXIT_INPUT
    Fa, Fb = fam[names[0]], fam[names[1]]
    level = args.level if args.level is not None else problem.level
    K = args.directions
    if K < 1:
        _err("--directions must be at least 1")
        return EXIT_INPUT

    pres = problem.presentation

    def moment_value(poly, moments):
        p = normal_form(poly, pres)
        return complex(sum(c * moments.get(w, 0j) for w, c in p.terms()))

    supports = []
    for k in range(K):
        theta = 2.0 * math.pi * k / K
        ux, uy = math.cos(theta), math.sin(theta)
        try:
            res = jnc_support(problem, [(Fa, -ux), (Fb, -uy)], level=level)
        except RelaxationError as e:
            _err(f"direction {k}: {e}")
            return EXIT_NOT_REPRESENTABLE
        if res.status != ipm.Status.OPTIMAL:
            _err(f"direction {k}: solver status {res.status.value}")
            return EXIT_SOLVER
        h = -res.bound
        px = moment_value(Fa, res.moments).real
        py = moment_value(Fb, res.moments).real
        supports.append((theta, ux, uy, h, px, py))

    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["kind", "angle", "dir_x", "dir_y", "support", "x", "y"])
        for theta, ux, uy, h, px, py in supports:
            w.writerow(["support", f"{theta:.12g}", f"{ux:.12g}", f"{uy:.12g}",
                        f"{h:.12g}", f"{px:.12g}", f"{py:.12g}"])
        if K >= 2:
            for k in range(K):
                t1, x1, y1, h1, _, _ = supports[k]
                t2, x2, y2, h2, _, _ = supports[(k + 1) % K]
                det = x1 * y2 - y1 * x2
                if abs(det) < 1e-12:
                    continue
                # intersection of u1.p = h1 with u2.p = h2
                vx = (h1 * y2 - h2 * y1) / det
                vy = (x1 * h2 - x2 * h1) / det
                w.writerow(["vertex", "", "", "", "",
                            f"{vx:.12g}", f"{vy:.12g}"])
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    try:
        model = import_sdpa_file(args.sdpa_file)
    except (OSError, SDPAFormatError) as e:
        _err(str(e))
        return EXIT_INPUT
    try:
        rep = parse_group_file(args.rep_file)
    except (OSError, GroupError) as e:
        _err(str(e))
        return EXIT_INPUT

    try:
        red = reduce_sdp(model, rep)
    except InvarianceError as e:
        _err(str(e))
        return EXIT_INVARIANCE
    except (ModelError, GroupError) as e:
        _err(str(e))
        return EXIT_INPUT

    print(f"m = {red.commutant_dim}")
    print(f"reduced block size {red.model.blocks[0].size} "
          f"({'real' if red.real_mode else 'complex, realified'}), "
          f"{len(red.model.constraints)} constraints")

    out_path = args.out or (args.sdpa_file + ".reduced.dat-s")
    export_model = red.model
    if not export_model.is_equality_only():
        export_model = to_equality_form(export_model)
    export_sdpa_file(export_model, out_path)
    print(f"wrote {out_path}")

    if args.verify:
        full = ipm.solve(to_equality_form(model))
        small = ipm.solve(to_equality_form(red.model))
        if full.status != ipm.Status.OPTIMAL or small.status != ipm.Status.OPTIMAL:
            _err(f"verification solve failed: full {full.status.value}, "
                 f"reduced {small.status.value}")
            return EXIT_SOLVER
        diff = abs(full.primal_value - small.primal_value)
        print(f"full optimum    {_fmt_float(full.primal_value)}")
        print(f"reduced optimum {_fmt_float(small.primal_value)}")
        print(f"difference      {diff:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="starsdp",
        description="Moment relaxations of *-algebra SDPs, with a built-in "
                    "interior-point solver and symmetry reduction.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="relax a problem file and solve it")
    p.add_argument("file", help="problem file")
    p.add_argument("--level", default=None,
                   help="relaxation level N, or range A-B for a table")
    p.add_argument("--tol", type=float, default=None,
                   help="solver gap and feasibility tolerance")
    p.add_argument("--export", metavar="PATH", default=None,
                   help="write the (last) relaxed model as sparse SDPA")
    p.add_argument("--json", action="store_true",
                   help="machine-readable report on standard output")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("jnc", help="sample a joint numerical cone slice")
    p.add_argument("file", help="problem file")
    p.add_argument("--pair", required=True, metavar="NAME,NAME",
                   help="two family names, e.g. F0,1 (F0 objective, "
                        "Fk k-th constraint, 1 the unit)")
    p.add_argument("--directions", type=int, default=16, metavar="K",
                   help="number of support directions (default 16)")
    p.add_argument("--level", type=int, default=None,
                   help="relaxation level (default: file setting)")
    p.add_argument("--out", metavar="PATH", default=None,
                   help="write CSV here instead of standard output")
    p.set_defaults(fn=cmd_jnc)

    p = sub.add_parser("reduce", help="symmetry-reduce a conventional SDP")
    p.add_argument("sdpa_file", help="sparse SDPA input")
    p.add_argument("rep_file", help="group representation file")
    p.add_argument("--out", metavar="PATH", default=None,
                   help="output path (default: INPUT.reduced.dat-s)")
    p.add_argument("--verify", action="store_true",
                   help="solve both models and report the difference")
    p.set_defaults(fn=cmd_reduce)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
