"""Command-line front end.

Every command writes a JSON payload (to ``--out`` or stdout), a CSV table
next to it when there is tabular data, and a run manifest
(``<out stem>.manifest.json``, or stderr without ``--out``). Payloads hold
no timing or thread information, so reruns with the same flags and seed
are byte-identical; wall time lives in the manifest only.

Exit codes: 0 pass, 1 usage or input error, 2 verification failure,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (AnsatzLabError, CapabilityError, ConstructionError, ConvergenceError, DecompositionError,
                     DomainError, InputError, ModelError, ScopeError)
from .serialization import SCHEMA_VERSION, csv_text, dumps, parse_fraction, read_json

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_NONCONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument helpers


def _floats(text: str, name: str, count: int = None) -> list:
    try:
        vals = [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}")
    if not vals or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"--{name}: expected finite numbers, got {text!r}")
    if count is not None and len(vals) != count:
        raise UsageError(f"--{name}: expected {count} numbers, got {len(vals)}")
    return vals


def _ints(text: str, name: str) -> list:
    try:
        vals = [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated integers, got {text!r}")
    if not vals:
        raise UsageError(f"--{name}: empty list")
    return vals


def _box(text: str, dim: int = None) -> list:
    vals = _floats(text, "box")
    if len(vals) % 2 or (dim is not None and len(vals) != 2 * dim):
        want = "an even count" if dim is None else f"{2 * dim}"
        raise UsageError(f"--box: expected {want} numbers (lo,hi per axis), got {len(vals)}")
    pairs = [(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]
    if any(a > b for a, b in pairs):
        raise UsageError("--box: each interval needs lo <= hi")
    return pairs


def _fraction(text: str, name: str) -> Fraction:
    try:
        return parse_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--{name}: not a number: {text!r}")


def _load_solution(path):
    from .ansatz import solution_from_dict

    p = Path(path)
    if not p.is_file():
        raise UsageError(f"solution file {path!r} not found")
    try:
        return solution_from_dict(read_json(p))
    except (KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"solution file {path!r} is malformed: {exc}")


def _load_function(text: str):
    """A preset name, inline JSON or a path to a JSON description."""
    from .convex_core import PiecewiseConvexMax, base_from_spec, identity_base, logsumexp_base

    if text == "max-xy0":
        ident = identity_base()
        return PiecewiseConvexMax.from_maps(2, [([[1, 0]], [0], ident), ([[0, 1]], [0], ident), ([[0, 0]], [0], ident)])
    if text.startswith("softmax:"):
        return logsumexp_base(float(text.split(":", 1)[1]), 2)
    try:
        spec = json.loads(text)
    except json.JSONDecodeError:
        p = Path(text)
        if not p.is_file():
            raise UsageError(f"--function: neither a preset, JSON, nor an existing file: {text!r}")
        spec = read_json(p)
    if not isinstance(spec, dict):
        raise UsageError("--function: expected a JSON object")
    if spec.get("kind") == "piecewise_max":
        return PiecewiseConvexMax.from_dict(spec)
    return base_from_spec(spec)


# ---------------------------------------------------------------------------
# commands; each returns (payload, csv (columns, rows) or None, verdicts, exit code)


def _prepare_solve(args):
    from .ansatz import AnsatzProblem, SolverConfig

    c = _fraction(args.c, "c")
    b = None if args.b is None else [_fraction(x, "b") for x in args.b.split(",")]
    if args.d > args.n or args.d < 1:
        raise UsageError(f"need 1 <= d < n, got n={args.n}, d={args.d}")
    problem = AnsatzProblem(args.n, args.d, c, b)
    cfg = SolverConfig(grid=args.grid, tol_r=args.tol)

    def run():
        from .ansatz import solve_bvp, solve_closed_form_d1

        code = EXIT_OK
        try:
            if problem.d == 1:
                sol = solve_closed_form_d1(problem.n, problem.c, problem.b[0])
            else:
                sol = solve_bvp(problem, cfg)
        except ConvergenceError as exc:
            if exc.solution is None:
                raise
            sol, code = exc.solution, EXIT_FAIL
        diag = sol.diagnostics
        verdicts = {
            "pde_residual": "pass" if diag["pde_residual_sup"] <= cfg.tol_r else "fail",
            "boundary_residual": "pass" if diag["boundary_residual_sup"] <= cfg.tol_b else "fail",
        }
        if "fail" in verdicts.values():
            code = EXIT_FAIL
        print(f"pde_residual_sup={diag['pde_residual_sup']:.3e} boundary_residual_sup="
              f"{diag['boundary_residual_sup']:.3e} convexity_worst={diag['convexity_worst']:.3e}", file=sys.stderr)
        s = np.linspace(0.0, 1.0, 101)
        if problem.d == 1:
            rows = [[float(t), float(v)] for t, v in zip(s, sol.value(s[:, None]))]
            cols = ["t", "u"]
        else:
            psi = sol.section_root(s, order=0)[0]
            rows = [[float(a), float(p), float(p) ** float(problem.alpha)] for a, p in zip(s, psi)]
            cols = ["s", "section_root", "section_value"]
        return sol.to_dict(), (cols, rows), verdicts, code

    return run


def _prepare_verify(args):
    from .tropical import OracleConfig, enumerate_cells

    sol = _load_solution(args.solution)
    box = _box(args.box, sol.d)
    if min(a for a, _ in box) <= 0:
        raise UsageError("--box: the box must have positive lower corner")
    if args.m < sol.n:
        raise UsageError("--m must be at least n")
    model = enumerate_cells(args.m, sol.n, sol.d)
    cfg = OracleConfig(samples=args.samples, h=args.h, seed=args.seed, threads=args.threads)
    override = None if args.c_override is None else _fraction(args.c_override, "c-override")

    def run():
        from .ansatz import AnsatzProblem, solve_bvp, solve_closed_form_d1
        from .tropical import verify_step4

        u = sol
        if override is not None:
            if sol.d == 1:
                u = solve_closed_form_d1(sol.n, override)
            else:
                u = solve_bvp(AnsatzProblem(sol.n, sol.d, override))
        rep = verify_step4(model, u, box, cfg)
        payload = {"schema_version": SCHEMA_VERSION, "command": "verify-step4", "n": sol.n, "d": sol.d,
                   "m": args.m, "box": box, "solution_c": u.problem.c, **rep}
        rows = [[" ".join(map(str, r["J"])), r["multiplicity"], r["contains_delta"], r["mass"], r["expected"],
                 r["verdict"]] for r in rep["cells"]]
        cols = ["J", "multiplicity", "contains_delta", "mass", "expected", "verdict"]
        verdicts = {"cells": "pass" if all(r["verdict"] == "pass" for r in rep["cells"]) else "fail",
                    "total": rep["total_verdict"]}
        return payload, (cols, rows), verdicts, EXIT_OK if rep["passed"] else EXIT_FAIL

    return run


def _prepare_extend(args):
    sol = _load_solution(args.solution)
    if args.margin <= 0 or args.tail <= 0:
        raise UsageError("--margin and --tail must be positive")

    def run():
        from .ansatz import extend_to_rd

        res = extend_to_rd(sol, margin=args.margin, tail=args.tail, seed=args.seed)
        diag = res.diagnostics
        rng = np.random.default_rng(args.seed)
        d = sol.d
        neg = -rng.random((1000, d)) * 2
        neg[:, 0] += np.abs(neg).sum(axis=1) * rng.random(1000)  # includes points with some t_i > 0
        neg = neg[neg.sum(axis=1) <= 0]
        zero_max = float(np.abs(res.extended.value(neg)).max())
        inside = rng.random((1000, d)) * 2 + 1e-3
        agree = float(np.max(np.abs(res.extended.value(inside) - sol.value(inside)) / np.maximum(1e-300, sol.value(inside))))
        verdicts = {
            "zero_region": "pass" if zero_max == 0.0 else "fail",
            "agreement": "pass" if agree <= (1e-6 if d == 1 else 1e-3) else "fail",
            "c1_gap": "pass" if diag["c1_gap"] <= 1e-4 else "fail",
            "diagonal_derivative": "pass" if diag["diagonal_derivative_min"] >= -1e-8 else "fail",
            # the d = 2 construction is not convex near the hyperplane; reported only
            "convexity": "pass" if diag["convexity_worst"] <= 1e-6 else "reported",
        }
        payload = {"schema_version": SCHEMA_VERSION, "command": "extend", "margin": args.margin, "tail": args.tail,
                   "diagnostics": {**diag, "zero_region_max": zero_max, "octant_relative_gap": agree},
                   "verdicts": verdicts}
        xs = np.linspace(-2.0, 2.0, 81)
        if d == 1:
            rows = [[float(x), float(v)] for x, v in zip(xs, res.extended.value(xs[:, None]))]
            cols = ["t", "u_extended"]
        else:
            pts = np.column_stack([xs, np.ones_like(xs)])
            rows = [[float(x), 1.0, float(v)] for x, v in zip(xs, res.extended.value(pts))]
            cols = ["t1", "t2", "u_extended"]
        failed = any(v == "fail" for v in verdicts.values())
        return payload, (cols, rows), verdicts, EXIT_FAIL if failed else EXIT_OK

    return run


def _prepare_ma_measure(args):
    from .ma_measure import OrthotopeRegion

    f = _load_function(args.function)
    region = OrthotopeRegion.from_intervals(_box(args.box))
    if args.method not in ("analytic", "oracle", "green"):
        raise UsageError("--method must be analytic, oracle or green")

    def run():
        from .ma_measure import ma_measure_analytic, ma_measure_green, ma_measure_oracle

        if args.method == "analytic":
            est = ma_measure_analytic(f, region, tol=args.tol)
        elif args.method == "green":
            est = ma_measure_green(f, region)
        else:
            from .convex_core import PiecewiseConvexMax

            g = f
            if not isinstance(g, PiecewiseConvexMax):
                g = PiecewiseConvexMax.from_maps(f.dim, [(np.eye(f.dim), np.zeros(f.dim), f)])
            est = ma_measure_oracle(g, region, samples=args.samples, h=args.h, seed=args.seed, threads=args.threads)
        payload = {"schema_version": SCHEMA_VERSION, "command": "ma-measure", **est.to_dict()}
        cols = ["method", "mass", "error_bound", "samples", "resolution"]
        rows = [[est.method, est.mass, est.error_bound, est.samples, est.resolution]]
        return payload, (cols, rows), {"computed": "pass"}, EXIT_OK

    return run


def _prepare_softmax(args):
    ks = _ints(args.k_list, "k-list")
    if min(ks) < 1:
        raise UsageError("--k-list entries must be positive")

    def run():
        from .ma_measure import softmax_trap_demo

        rows = softmax_trap_demo(ks)
        last = rows[-1]["restricted_mass"]
        verdicts = {"restricted_limit": "pass" if abs(last - 1 / 6) <= 0.01 else "fail",
                    "total_mass": "pass" if all(abs(r["total_mass"] - 0.5) <= 0.01 for r in rows) else "fail"}
        payload = {"schema_version": SCHEMA_VERSION, "command": "softmax-demo", "rows": rows,
                   "restricted_target": Fraction(1, 6), "total_target": Fraction(1, 2), "verdicts": verdicts}
        cols = ["k", "restricted_mass", "restricted_error", "total_mass", "total_error"]
        table = [[r[c] for c in cols] for r in rows]
        failed = "fail" in verdicts.values()
        return payload, (cols, table), verdicts, EXIT_FAIL if failed else EXIT_OK

    return run


def _prepare_hull(args):
    ts = [_fraction(x, "t") for x in args.t.split(",") if x.strip()]
    if not ts or min(ts) <= 0:
        raise UsageError("--t needs positive values")
    if args.n < 2:
        raise UsageError("--n must be at least 2")

    def run():
        from .ma_measure import hull_volume_linear_in_t

        rows, ratios = hull_volume_linear_in_t(args.n, ts)
        fact = math.factorial(args.n)
        exact_ok = all(r["volume"] == r["t"] / fact for r in rows)
        linear_ok = all(q == 2 for q in ratios)
        verdicts = {"volume_equals_t_over_factorial": "pass" if exact_ok else "fail",
                    "linearity": "pass" if linear_ok else "fail"}
        payload = {"schema_version": SCHEMA_VERSION, "command": "hull-volume", "n": args.n,
                   "rows": rows, "ratios": ratios, "verdicts": verdicts}
        table = [[r["t"], r["volume"], r["volume_float"], q] for r, q in zip(rows, ratios)]
        failed = "fail" in verdicts.values()
        return payload, (["t", "volume", "volume_float", "ratio_2t_over_t"], table), verdicts, \
            EXIT_FAIL if failed else EXIT_OK

    return run


def _prepare_leak(args):
    ks = _ints(args.k_list, "k-list")
    if min(ks) < 1:
        raise UsageError("--k-list entries must be positive")
    sol = None if args.solution is None else _load_solution(args.solution)
    if sol is not None and sol.n != 2:
        raise UsageError("mollify-leak works on planar cells (n = 2)")

    def run():
        from .ansatz import solve_closed_form_d1
        from .tropical import build_v, cell_restriction, constant_c, enumerate_cells, mollification_leak

        model = enumerate_cells(args.m, 2, 1)
        u = sol if sol is not None else solve_closed_form_d1(2, constant_c(model))
        v = build_v(u, args.m, 1)
        cell = model.delta_cells()[0]
        res = cell_restriction(v, cell)
        rows = mollification_leak(res, ks, extent=args.extent, shift=not args.centred,
                                  inside_box=[(0.0, 0.5), (0.5, 1.5)])
        leaks = [r["leak"] for r in rows]
        decreasing = all(b < a for a, b in zip(leaks, leaks[1:]))
        if args.centred:
            verdicts = {"contrast_run": "pass"}
        else:
            verdicts = {"final_leak": "pass" if leaks[-1] <= args.eps else "fail",
                        "monotone": "pass" if decreasing else "fail"}
        payload = {"schema_version": SCHEMA_VERSION, "command": "mollify-leak", "cell": list(cell.J),
                   "kernel": "centred" if args.centred else "shifted", "rows": rows, "verdicts": verdicts}
        cols = ["k", "leak", "outside_mass", "v_region_mass", "inside_mass"]
        table = [[r[c] for c in cols] for r in rows]
        failed = "fail" in verdicts.values()
        return payload, (cols, table), verdicts, EXIT_FAIL if failed else EXIT_OK

    return run


def _prepare_hybrid(args):
    from .hybrid import ModelHybridPotential, degree_from_measure_scaling

    sol = None if args.solution is None else _load_solution(args.solution)
    n = sol.n if sol is not None else args.n
    if n is None:
        raise UsageError("give --n or --solution")
    d = sol.d if sol is not None else 1
    slopes = _floats(args.slopes, "slopes", d)
    if args.t is not None:
        levels = {"t_list": _floats(args.t, "t")}
    else:
        levels = {"log_inv_t": _floats(args.log_inv_t, "log-inv-t")}
    corrections = [] if args.bound == 0 else [(args.bound, args.exponent)]

    def run():
        from .ansatz import extend_to_rd, solve_closed_form_d1
        from .hybrid import rescaled_limit

        u = sol if sol is not None else solve_closed_form_d1(n, args.c)
        base = extend_to_rd(u, diagnostics=False).extended
        model = ModelHybridPotential(degree_from_measure_scaling(n, d), slopes, base, corrections)
        rep = rescaled_limit(model, tol=args.tol, **levels)
        verdicts = {"limit": "pass" if rep["passed"] else "fail"}
        payload = {"schema_version": SCHEMA_VERSION, "command": "hybrid-limit", "n": n, "d": d,
                   "alpha": model.alpha, "slopes": list(slopes), "corrections": [list(c) for c in corrections],
                   **rep, "verdicts": verdicts}
        cols = ["log_inv_t", "ratio", "target", "abs_error"]
        table = [[r[c] for c in cols] for r in rep["rows"]]
        return payload, (cols, table), verdicts, EXIT_OK if rep["passed"] else EXIT_FAIL

    return run


def _prepare_odaka(args):
    if not 1 <= args.d <= args.n:
        raise UsageError("need 1 <= d <= n")

    def run():
        from .hybrid import odaka_check

        vd, holds = odaka_check(args.n, args.d)
        verdicts = {"inequality": "pass" if holds else "fail"}
        payload = {"schema_version": SCHEMA_VERSION, "command": "odaka", "n": args.n, "d": args.d, "vd": vd,
                   "vd_float": float(vd), "holds": holds, "equality": vd == args.d, "verdicts": verdicts}
        return payload, None, verdicts, EXIT_OK if holds else EXIT_FAIL

    return run


def _prepare_decomposition(args):
    if not 1 <= args.d <= args.n <= args.m:
        raise UsageError("need 1 <= d <= n <= m")

    def run():
        from .tropical import check_decomposition, constant_c, decomposition_mutants, enumerate_cells

        model = enumerate_cells(args.m, args.n, args.d, args.multiplicity)
        rep = check_decomposition(model, raise_on_failure=False)
        c = constant_c(model)
        rows = [["model", rep["passed"], rep["failure"] or ""]]
        mutants_ok = True
        if args.mutants:
            for name, mutant in decomposition_mutants(model):
                r = check_decomposition(mutant, raise_on_failure=False)
                rows.append([name, r["passed"], r["failure"] or ""])
                mutants_ok &= not r["passed"]
        verdicts = {"model": "pass" if rep["passed"] else "fail",
                    "count_identity": "pass" if model.a * c == math.factorial(args.n - args.d) else "fail"}
        if args.mutants:
            verdicts["mutants_rejected"] = "pass" if mutants_ok else "fail"
        payload = {"schema_version": SCHEMA_VERSION, "command": "check-decomposition", "m": args.m, "n": args.n,
                   "d": args.d, "cells": len(model.cells), "a": model.a, "c": c, "report": rep,
                   "checked": [{"model": r[0], "passed": r[1], "failure": r[2]} for r in rows],
                   "verdicts": verdicts}
        failed = "fail" in verdicts.values()
        return payload, (["model", "passed", "failure"], rows), verdicts, EXIT_FAIL if failed else EXIT_OK

    return run


# ---------------------------------------------------------------------------
# parser


def _default_threads() -> int:
    raw = os.environ.get("ANSATZLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random draw (default 0)")
    common.add_argument("--threads", type=int, default=_default_threads(),
                        help="worker cap; default from ANSATZLAB_THREADS, else 1")
    common.add_argument("--dry-run", action="store_true", help="validate flags and inputs, compute nothing")
    common.add_argument("--out", default=None, help="JSON output path (stdout if omitted)")

    parser = _Parser(prog="ansatzlab", description="Homogeneous Monge-Ampere solutions and mass checks.")
    parser.add_argument("--version", action="version", version=f"ansatzlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="solve the octant boundary problem")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", required=True, help="right-hand side (decimal or p/q)")
    p.add_argument("--b", default=None, help="comma-separated positive weights")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-3, help="interior residual tolerance")
    p.set_defaults(prepare=_prepare_solve)

    p = sub.add_parser("verify-step4", parents=[common], help="per-cell mass identities over a box")
    p.add_argument("--solution", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--box", required=True, help="lo,hi per distinguished axis")
    p.add_argument("--samples", type=int, default=4096, help="primal cells per slab")
    p.add_argument("--h", type=float, default=1e-3, help="dual raster spacing")
    p.add_argument("--c-override", default=None, help="re-solve with this c (negative control)")
    p.set_defaults(prepare=_prepare_verify)

    p = sub.add_parser("extend", parents=[common], help="extend a solution to all of R^d")
    p.add_argument("--solution", required=True)
    p.add_argument("--margin", type=float, default=3.0)
    p.add_argument("--tail", type=float, default=1.0)
    p.set_defaults(prepare=_prepare_extend)

    p = sub.add_parser("ma-measure", parents=[common], help="Monge-Ampere mass of a box")
    p.add_argument("--function", required=True, help="preset (max-xy0, softmax:K), JSON text or JSON file")
    p.add_argument("--box", required=True)
    p.add_argument("--method", default="oracle")
    p.add_argument("--samples", type=int, default=40000)
    p.add_argument("--h", type=float, default=2e-3)
    p.add_argument("--tol", type=float, default=1e-7)
    p.set_defaults(prepare=_prepare_ma_measure)

    p = sub.add_parser("softmax-demo", parents=[common], help="mass of smoothed max{x,y,0} near the origin")
    p.add_argument("--k-list", default="4,16,64,256")
    p.set_defaults(prepare=_prepare_softmax)

    p = sub.add_parser("hull-volume", parents=[common], help="exact simplex volumes t/n!")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", required=True)
    p.set_defaults(prepare=_prepare_hull)

    p = sub.add_parser("mollify-leak", parents=[common], help="mass of mollified cells outside the octant")
    p.add_argument("--k-list", default="4,16,64")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--solution", default=None)
    p.add_argument("--extent", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--centred", action="store_true", help="kernel centred at the origin, for contrast")
    p.set_defaults(prepare=_prepare_leak)

    p = sub.add_parser("hybrid-limit", parents=[common], help="rescaled potential limit")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--solution", default=None)
    p.add_argument("--slopes", default="1")
    p.add_argument("--bound", type=float, default=0.0)
    p.add_argument("--exponent", type=float, default=0.0)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--t", default=None, help="decreasing t values in (0,1)")
    group.add_argument("--log-inv-t", default="10,100,1000,10000", help="increasing log(1/t) values")
    p.add_argument("--tol", type=float, default=1e-3)
    p.set_defaults(prepare=_prepare_hybrid)

    p = sub.add_parser("odaka", parents=[common], help="volume-growth dimension inequality")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(prepare=_prepare_odaka)

    p = sub.add_parser("check-decomposition", parents=[common], help="intersection rules of the cell model")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--multiplicity", type=int, default=1)
    p.add_argument("--mutants", action="store_true", help="also run the corrupted variants")
    p.set_defaults(prepare=_prepare_decomposition)
    return parser


def _paths(out):
    base = Path(out)
    stem = base.with_suffix("") if base.suffix == ".json" else base
    return base, Path(str(stem) + ".csv"), Path(str(stem) + ".manifest.json")


def _parameters(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("prepare",)}


def _write(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


_LIST_FLAGS = ("--box", "--t", "--log-inv-t", "--slopes", "--b", "--c")


def _join_list_flags(argv):
    """Attach list values such as ``--box -1,1,-1,1`` to their flag.

    argparse would otherwise read a value starting with '-' as an option.
    """
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _LIST_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and argv[i + 1][1:2].isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_list_flags(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("ansatzlab: error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    verdicts, code = {}, EXIT_OK
    try:
        run = args.prepare(args)
        if args.dry_run:
            payload, table, verdicts = None, None, {"dry_run": "pass"}
        else:
            payload, table, verdicts, code = run()
    except (UsageError, InputError, DomainError, ScopeError, CapabilityError, ModelError) as exc:
        print(f"ansatzlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"ansatzlab: did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (DecompositionError, ConstructionError) as exc:
        print(f"ansatzlab: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except AnsatzLabError as exc:
        print(f"ansatzlab: error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    manifest = {
        "schema_version": SCHEMA_VERSION, "command": args.command, "parameters": _parameters(args),
        "seed": args.seed, "version": __version__, "wall_time_seconds": time.perf_counter() - start,
        "verdicts": verdicts, "exit_code": code,
    }
    if args.out:
        out, csv_path, manifest_path = _paths(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if payload is not None:
            _write(out, dumps(payload))
            if table is not None:
                _write(csv_path, csv_text(*table))
        _write(manifest_path, dumps(manifest))
    else:
        if payload is not None:
            sys.stdout.write(dumps(payload))
        sys.stderr.write(dumps(manifest))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
