"""Acceptance criteria, one test per criterion at the stated tolerances.

Each test records a PASS/FAIL line that is printed in the terminal summary
under "acceptance criteria". The face residual at distance 1e-2 for the
two-component problem is marked as a strict expected failure: the exact
solution itself has a value near 0.14 there, above the 5e-2 threshold.
"""

import json
import math
import time
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from ansatzlab.ansatz import (AnsatzProblem, SolverConfig, boundary_residual, extend_to_rd, face_probe_points,
                              interior_test_points, pde_residual, solve_bvp, solve_closed_form_d1)
from ansatzlab.cli import main
from ansatzlab.convex_core import PiecewiseConvexMax, check_convexity, identity_base, quadratic_base
from ansatzlab.convex_core.checks import box_sampler
from ansatzlab.hybrid import ModelHybridPotential, degree_from_measure_scaling, odaka_check, rescaled_limit
from ansatzlab.ma_measure import (OrthotopeRegion, hull_volume_linear_in_t, ma_measure_analytic, ma_measure_oracle,
                                  softmax_trap_demo)
from ansatzlab.tropical import (Cell, build_v, cell_restriction, check_decomposition, constant_c,
                                decomposition_mutants, enumerate_cells, mollification_leak,
                                reduced_dependence_check, verify_step4)


@pytest.fixture(scope="module")
def solved():
    start = time.perf_counter()
    sol = solve_bvp(AnsatzProblem(3, 2, Fraction(1)), SolverConfig(grid=32))
    return sol, time.perf_counter() - start


def max_xy0():
    ident = identity_base()
    return PiecewiseConvexMax.from_maps(2, [([[1, 0]], [0], ident), ([[0, 1]], [0], ident), ([[0, 0]], [0], ident)])


def test_c01_closed_form(record):
    worst, origin_slope = 0.0, []
    for n in (2, 3, 4, 5):
        c = 1.7
        sol = solve_closed_form_d1(n, c)
        t = np.linspace(0.01, 10.0, 100)[:, None]
        _, g, H = sol.evaluate(t, 2)
        rel = np.abs(H[:, 0, 0] * g[:, 0] ** (n - 1) - c) / c
        worst = max(worst, float(rel.max()))
        origin_slope.append(float(sol.gradient(np.zeros((1, 1)))[0, 0]))
    ok = worst <= 1e-12 and all(s == 0.0 for s in origin_slope)
    assert record("1 closed form", ok, f"worst relative ODE residual {worst:.2e}, u'(0) = {origin_slope}")


def test_c02_solver_interior(solved, record):
    sol, seconds = solved
    res = float(np.abs(pde_residual(sol, interior_test_points(2))).max())
    t = np.random.default_rng(0).random((500, 2)) + 1e-3
    homog = max(float(np.max(np.abs(sol.value(lam * t) - lam ** (5 / 3) * sol.value(t))
                            / (1 + np.abs(sol.value(t))))) for lam in (0.5, 2.0))
    conv = check_convexity(sol.value, box_sampler([1e-3, 1e-3], [2.0, 2.0]), trials=2000, tol=1e-6)
    ok = res <= 1e-3 and homog <= 1e-9 and conv.worst_violation <= 1e-6 and seconds <= 60
    assert record("2 solver (interior, homogeneity, convexity, runtime)", ok,
                  f"pde sup {res:.2e}, homogeneity {homog:.1e}, convexity {conv.worst_violation:.1e}, "
                  f"{seconds:.1f} s")


@pytest.mark.xfail(strict=True, reason="the exact solution has face residual about 0.14 at distance 1e-2")
def test_c02_solver_face_distance(solved, record):
    sol, _ = solved
    near = float(np.abs(boundary_residual(sol, face_probe_points(2, 1e-2))).max())
    on_face = float(np.abs(boundary_residual(sol, face_probe_points(2, 0.0))).max())
    ok = near <= 5e-2
    record("2 solver (face residual at distance 1e-2, expected to fail)", ok,
           f"residual {near:.3f} at 1e-2, {on_face:.1e} on the face")
    assert ok


def test_c03_extension(solved, record):
    sol2, _ = solved
    sol1 = solve_closed_form_d1(2, Fraction(1, 3))
    rng = np.random.default_rng(1)
    details, ok = [], True
    for sol, rtol in ((sol1, 1e-6), (sol2, 1e-3)):
        d = sol.d
        ext = extend_to_rd(sol)
        f = ext.extended
        x = rng.uniform(-3, 3, size=(4000, d))
        neg = x[x.sum(axis=1) <= 0][:1000]
        zero_ok = len(neg) == 1000 and bool(np.all(f.value(neg) == 0.0))
        oct_pts = rng.uniform(1e-3, 3, size=(1000, d))
        rel = float(np.max(np.abs(f.value(oct_pts) - sol.value(oct_pts)) / np.abs(sol.value(oct_pts))))
        y = rng.uniform(-3, 3, size=(10000, d))
        diag_min = float((f.gradient(y) @ np.ones(d)).min())
        c1 = ext.diagnostics["c1_gap"]
        ok &= zero_ok and rel <= rtol and c1 <= 1e-4 and diag_min >= -1e-8
        details.append(f"d={d}: zero {zero_ok}, rel {rel:.1e}, c1 gap {c1:.1e}, min diagonal {diag_min:.1e}")
    assert record("3 extension", ok, "; ".join(details))


def test_c04_alexandrov_measure(record):
    mass = ma_measure_oracle(max_xy0(), OrthotopeRegion((-1, -1), (1, 1)), samples=10000, h=2e-3).mass
    rng = np.random.default_rng(4)
    agree = 0
    for _ in range(20):
        A = rng.normal(size=(2, 2))
        Q = A @ A.T + 0.3 * np.eye(2)
        lo = rng.uniform(-1, 0, size=2)
        box = OrthotopeRegion(tuple(lo), tuple(lo + 1.0))
        f = PiecewiseConvexMax.from_maps(2, [(np.eye(2), np.zeros(2), quadratic_base(Q))])
        oracle = ma_measure_oracle(f, box, samples=2500, h=1e-2)
        exact = ma_measure_analytic(quadratic_base(Q), box)
        agree += abs(oracle.mass - exact.mass) <= oracle.error_bound + exact.error_bound
    ok = abs(mass - 0.5) <= 0.02 and agree == 20
    assert record("4 Alexandrov measure", ok, f"max(x,y,0) mass {mass:.4f}, quadratics agreeing {agree}/20")


def test_c05_softmax_trap(record):
    rows = softmax_trap_demo([4, 16, 64, 256])
    last = rows[-1]["restricted_mass"]
    totals = [r["total_mass"] for r in rows]
    ok = abs(last - 1 / 6) <= 0.01 and all(abs(t - 0.5) <= 0.01 for t in totals)
    assert record("5 softmax trap", ok, f"restricted mass at k=256 {last:.7f}, totals within "
                                         f"{max(abs(t - 0.5) for t in totals):.1e} of 1/2")


def test_c06_hull_linearity(record):
    ok = True
    for n in range(2, 7):
        rows, ratios = hull_volume_linear_in_t(n, [1, 2, 3, Fraction(5, 2)])
        ok &= all(r["volume"] == Fraction(r["t"]) / math.factorial(n) for r in rows)
        ok &= all(q == 2 for q in ratios)
    assert record("6 hull linearity", ok, "vol = t/n! and vol(2t)/vol(t) = 2 exactly for n = 2..6")


def test_c07_step4_identity(record):
    u = solve_closed_form_d1(2, Fraction(1, 3))
    model = enumerate_cells(2, 2, 1)
    ok, details = True, []
    for box in ([(0.5, 1.5)], [(0.2, 0.6)], [(1.0, 2.5)]):
        rep = verify_step4(model, u, box)
        leb = box[0][1] - box[0][0]
        delta = [r["mass"] / leb for r in rep["cells"] if r["contains_delta"]]
        other = max(r["mass"] / leb for r in rep["cells"] if not r["contains_delta"])
        ok &= rep["passed"] and len(delta) == 3
        details.append(f"R={box[0]}: per cell/Leb {min(delta):.4f}..{max(delta):.4f}, others {other:.1e}, "
                       f"total/Leb {rep['total'] / leb:.4f}")
    v = build_v(u, 2, 1)
    res = cell_restriction(v, Cell((0, 3), 1, 1))
    worst = 0.0
    for s in np.linspace(0.05, 4.0, 50):
        vol = res.function.subgradient_polytope(np.array([0.0, s])).volume
        expected = float(u.gradient(np.array([[s]]))[0, 0])  # (sum du)^(n-d) / (n-d)! with n-d = 1
        worst = max(worst, abs(vol - expected) / expected)
    ok &= worst <= 1e-6
    details.append(f"case-4 volume relative error {worst:.1e}")
    assert record("7 per-cell identity", ok, "; ".join(details))


def test_c08_case3_annihilation(solved, record):
    sol, _ = solved
    v = build_v(sol, 3, 2)
    res = cell_restriction(v, Cell((0, 1, 4), 1, 2))
    worst = 0.0
    for s in np.linspace(0.02, 3.0, 50):
        verts = np.asarray(res.function.subgradient_polytope(np.array([0.0, 0.0, s])).vertices)
        spread = float(np.ptp(verts[:, list(res.primed_axes)], axis=0).max())
        scale = 1 + float(np.abs(sol.gradient(np.array([[s, 0.0]]))).sum())
        worst = max(worst, spread / scale)
    ok = worst <= 1e-6
    assert record("8 case-3 annihilation", ok, f"worst scaled extent {worst:.1e}")


def test_c09_no_leak(record):
    v = build_v(solve_closed_form_d1(2, Fraction(1, 3)), 2, 1)
    res = cell_restriction(v, Cell((0, 3), 1, 1))
    leaks = [r["leak"] for r in mollification_leak(res, [4, 16, 64])]
    rank = reduced_dependence_check(res)
    ok = leaks[2] <= 1e-3 and leaks[0] > leaks[1] > leaks[2] and rank["rank"] == 1
    assert record("9 no leak", ok, f"leak {', '.join(f'{x:.2e}' for x in leaks)} at k=4,16,64; "
                                    f"rank {rank['rank']} (n-1 = 1)")


def test_c10_combinatorics(record):
    rng = np.random.default_rng(10)
    identity_ok = decomposition_ok = 0
    for _ in range(50):
        n = int(rng.integers(2, 6))
        d = int(rng.integers(1, n))
        m = int(rng.integers(n, 9))
        mult = {J: int(rng.integers(1, 4)) for J in combinations(range(m + d + 1), n)}
        model = enumerate_cells(m, n, d, mult)
        identity_ok += model.a * constant_c(model) == math.factorial(n - d)
        decomposition_ok += check_decomposition(model, raise_on_failure=False)["passed"]
    mutants = decomposition_mutants(enumerate_cells(3, 3, 1))
    rejected = sum(not check_decomposition(bad, raise_on_failure=False)["passed"] for _, bad in mutants)
    ok = identity_ok == 50 and decomposition_ok == 50 and rejected == len(mutants) == 10
    assert record("10 combinatorics", ok, f"a*c identity {identity_ok}/50, decomposition {decomposition_ok}/50, "
                                           f"mutants rejected {rejected}/10")


def test_c11_hybrid_scaling(record):
    u = solve_closed_form_d1(2, 9).as_base()
    model = ModelHybridPotential(Fraction(3, 2), (1.0,), u, corrections=((10.0, 0.0),))
    t = 1e-7
    first, second = (r["abs_error"] for r in rescaled_limit(model, t_list=[t, t * t])["rows"])
    degrees = all(degree_from_measure_scaling(n, d) == Fraction(n + d, n)
                  for n in range(1, 21) for d in range(1, n + 1))
    odaka = all(odaka_check(n, d)[1] and ((odaka_check(n, d)[0] == d) == (d == n))
                for n in range(1, 21) for d in range(1, n + 1))
    ok = second <= 0.6 * first and degrees and odaka
    assert record("11 hybrid scaling", ok, f"error ratio t^2/t {second / first:.3f}, degrees {degrees}, "
                                            f"volume-growth inequality {odaka}")


def test_c12_reproducibility(tmp_path, record):
    sol = tmp_path / "u.json"
    assert main(["solve", "--n", "2", "--d", "1", "--c", "1/3", "--out", str(sol)]) == 0
    commands = {
        "verify-step4": ["verify-step4", "--solution", str(sol), "--m", "2", "--box", "0.5,1.5", "--seed", "7"],
        "ma-measure": ["ma-measure", "--function", "max-xy0", "--box", "-1,1,-1,1", "--samples", "4000",
                       "--h", "5e-3", "--seed", "7"],
    }
    same = []
    for name, argv in commands.items():
        outs = []
        for threads in ("1", "4"):
            out = tmp_path / f"{name}-{threads}.json"
            assert main([*argv, "--threads", threads, "--out", str(out)]) in (0, 2)
            outs.append(out.read_bytes())
            json.loads(outs[-1])
        same.append(outs[0] == outs[1])
    ok = all(same)
    assert record("12 reproducibility", ok, f"byte-identical payloads for {', '.join(commands)}: {same}")
