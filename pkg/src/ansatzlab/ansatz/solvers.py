"""Solvers and residuals for the homogeneous boundary problem."""

from __future__ import annotations

import numpy as np

from ..convex_core.checks import check_convexity
from ..errors import (ConvergenceError, InputError, ScopeError, SingularPointError,
                      StencilError)
from .profile_d2 import cross_section_values
from .solution import (AnsatzProblem, AnsatzSolution, ClosedFormD1, SimplexGrid,
                       SolverConfig)


def solve_closed_form_d1(n: int, c, b=None) -> AnsatzSolution:
    """Homogeneous closed-form solution for one component.

    u(t) = a1 (n t)**((n+1)/n) with a1 = c**(1/n) / (n+1), which solves
    u'' (u')**(n-1) = c and has u'(0) = 0. A weight b rescales t -> t/b
    and c -> c b**2.
    """
    problem = AnsatzProblem(n, 1, c, None if b is None else (b,) if np.ndim(b) == 0 else tuple(b))
    a1 = float(problem.unweighted_c) ** (1.0 / problem.n) / (problem.n + 1)
    sol = AnsatzSolution(problem, ClosedFormD1(problem.n, a1, 0.0, 0.0))
    diag = compute_diagnostics(sol, SolverConfig())
    diag["method"] = "closed_form"
    return AnsatzSolution(problem, sol.representation, diag)


# ---------------------------------------------------------------------------
# residuals


def _eval_parts(u, points, need_fd: bool):
    """Gradient and Hessian of ``u`` at points, analytic or by differences."""
    if isinstance(u, AnsatzSolution) and need_fd:
        from ..convex_core.functions import fd_gradient, fd_hessian

        return fd_gradient(u.value, points), fd_hessian(u.value, points)
    if isinstance(u, AnsatzSolution):
        _, g, H = u.evaluate(points, 2)
        return g, H
    return u.gradient(points), u.hessian(points)


def pde_residual(u, points, b=None, *, n: int = None, c=None, method: str = "auto", h_rel: float = 1e-4):
    """det(D^2 u) (sum b_i du/dt_i)**(n-d) - c at each point.

    For a closed-form solution the derivatives are analytic; for grid
    solutions centred finite differences (step ``h_rel * (1 + |t|)``, one
    Richardson level) are used unless ``method="analytic"``. A plain
    :class:`SmoothConvexBase` may be passed together with ``n`` and ``c``;
    ``n == d`` is then allowed, which only exercises the determinant path.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(u, AnsatzSolution):
        n = u.n if n is None else n
        c = u.problem.c if c is None else c
        d = u.d
        weights = u.problem.weights if b is None else np.asarray(b, dtype=float)
        if method == "auto":
            method = "analytic" if isinstance(u.representation, ClosedFormD1) else "fd"
    else:
        if n is None or c is None:
            raise InputError("n and c are required when u is not an AnsatzSolution")
        d = u.dim
        if n < d:
            raise InputError("need n >= d")
        weights = np.ones(d) if b is None else np.asarray(b, dtype=float)
        method = "analytic" if method == "auto" else method
    if pts.shape[-1] != d:
        raise InputError(f"expected points in R^{d}")
    if weights.shape != (d,):
        raise InputError("weights must have one entry per component")
    if method == "fd":
        h = h_rel * (1 + np.linalg.norm(pts, axis=-1))
        if np.any(pts.min(axis=-1) <= 2 * h):
            raise StencilError("point closer to a face than the finite-difference stencil")
    grad, H = _eval_parts(u, pts, method == "fd")
    det = np.linalg.det(H) if d > 1 else H[..., 0, 0]
    drift = grad @ weights
    return det * drift ** (n - d) - float(c)


def boundary_residual(u, face_points, b=None, h=None, method: str = "one_sided"):
    """sum_i b_i du/dt_i near coordinate faces.

    The default ``one_sided`` method uses the second-order forward
    difference along the inward direction ``b`` (all weights positive, so
    it points into the octant from every face). ``method="analytic"`` uses
    the representation's own gradient.
    """
    pts = np.atleast_2d(np.asarray(face_points, dtype=float))
    d = pts.shape[-1]
    if np.any(np.all(np.abs(pts) <= 1e-14, axis=-1)):
        raise SingularPointError("the boundary residual is not defined at the origin")
    if b is None:
        b = u.problem.weights if isinstance(u, AnsatzSolution) else np.ones(d)
    b = np.asarray(b, dtype=float)
    if method == "analytic":
        return u.gradient(pts) @ b
    if method != "one_sided":
        raise InputError(f"unknown method {method!r}")
    if h is None:
        h = 1e-4 * (1 + np.linalg.norm(pts, axis=-1))
    h = np.broadcast_to(np.asarray(h, dtype=float), pts.shape[:-1])[..., None]
    f = u.value if hasattr(u, "value") else u
    f0, f1, f2 = f(pts), f(pts + h * b), f(pts + 2 * h * b)
    return (-3 * f0 + 4 * f1 - f2) / (2 * h[..., 0])


# ---------------------------------------------------------------------------
# diagnostics


def interior_test_points(d: int, rho_range=(0.25, 4.0), per_axis: int = 19, margin: float = 0.05):
    """Test grid: cross-section nodes away from faces times three radii."""
    radii = np.array([rho_range[0], np.sqrt(rho_range[0] * rho_range[1]), rho_range[1]])
    if d == 1:
        return radii[:, None]
    grids = np.meshgrid(*([np.linspace(margin, 1 - margin, per_axis)] * (d - 1)), indexing="ij")
    y = np.stack([g.ravel() for g in grids], axis=-1)
    last = 1 - y.sum(axis=1)
    keep = last >= margin - 1e-12
    sec = np.column_stack([y[keep], last[keep]])
    return (radii[:, None, None] * sec[None]).reshape(-1, d)


def face_probe_points(d: int, distance: float, count: int = 9, rho: float = 1.0):
    """Points at the given distance from the face {t_1 = 0} (rho ~ 1)."""
    if d == 1:
        return np.array([[distance]])
    rng = np.random.default_rng(12345)
    rest = rng.dirichlet(np.ones(d - 1), size=count) * (rho - distance)
    return np.column_stack([np.full(count, distance), rest])


def octant_sampler(d: int, hi: float = 2.0):
    def sample(rng, size):
        return hi * rng.random((size, d)) + 1e-3

    return sample


def compute_diagnostics(sol: AnsatzSolution, cfg: SolverConfig) -> dict:
    d = sol.d
    pts = interior_test_points(d, cfg.rho_range)
    res = pde_residual(sol, pts)
    diag = {"pde_residual_sup": float(np.abs(res).max())}
    if d == 1:
        on_face = np.array([[0.0]])
        diag["boundary_residual_sup"] = float(abs(sol.gradient(on_face)[0, 0]))
    else:
        faces = face_probe_points(d, 0.0)
        diag["boundary_residual_sup"] = float(np.abs(boundary_residual(sol, faces)).max())
        near = face_probe_points(d, 1e-2)
        diag["boundary_residual_at_1e-2"] = float(np.abs(boundary_residual(sol, near)).max())
    conv = check_convexity(sol.value, octant_sampler(d), trials=2000, tol=1e-6, seed=7)
    diag["convexity_worst"] = conv.worst_violation
    return diag


# ---------------------------------------------------------------------------
# solvers


def initial_section_value(n: int, d: int, c: float) -> float:
    """Constant cross-section guess (c^(1/n)/(n+1)) (n/d)^((n+1)/n)."""
    return (c ** (1.0 / n) / (n + 1)) * (n / d) ** ((n + 1) / n)


def _solve_single_component(problem: AnsatzProblem, cfg: SolverConfig) -> AnsatzSolution:
    """Cross-section is a point: solve g^n alpha^n (alpha - 1) = c by Newton."""
    n = problem.n
    a = float(problem.alpha)
    c = float(problem.unweighted_c)
    # symmetric-point value of the closed form, which is already the answer
    # for c; Newton then only polishes rounding
    g = initial_section_value(n, problem.d, c)
    res = None
    for _ in range(cfg.max_iter):
        res = g**n * a**n * (a - 1) - c
        jac = n * g ** (n - 1) * a**n * (a - 1)
        step = res / jac
        for lam in cfg.damping:
            trial = g - lam * step
            if trial > 0 and abs(trial**n * a**n * (a - 1) - c) < abs(res):
                g = trial
                break
        else:
            break
        if abs(res) <= 1e-15 * c:
            break
    res = g**n * a**n * (a - 1) - c
    rep = SimplexGrid(1, np.ones((1, 1)), np.array([g]), "constant", 1)
    return AnsatzSolution(problem, rep)


def _solve_two_components(problem: AnsatzProblem, cfg: SolverConfig) -> AnsatzSolution:
    n = problem.n
    a = float(problem.alpha)
    N = cfg.grid
    theta = np.linspace(0.0, np.pi, N + 1)
    s = 0.5 * (1 - np.cos(theta))
    s[0], s[-1] = 0.0, 1.0
    G, _ = cross_section_values(n, float(problem.unweighted_c), s)
    # face condition: 2 alpha G + (1 - 2 s) G' = 0 at s = 0 and s = 1
    slopes = (-2 * a * G[0], 2 * a * G[-1])
    rep = SimplexGrid(2, np.column_stack([s, 1 - s]), G, "quintic_theta_spline", N, slopes)
    return AnsatzSolution(problem, rep)


def solve_bvp(problem: AnsatzProblem, cfg: SolverConfig = None) -> AnsatzSolution:
    """Solve the boundary problem in the homogeneous cross-section form.

    One component: the cross-section is a point and the equation reduces to
    a scalar one. Two components (default ``method="auto"``): the reduced
    ODE is integrated to high accuracy and sampled on the grid. Three or
    more components raise :class:`ScopeError`.
    Raises :class:`ConvergenceError` carrying the solution when the
    interior residual exceeds ``cfg.tol_r``.
    """
    cfg = SolverConfig() if cfg is None else cfg
    d = problem.d
    if d - 1 > 3:
        raise ScopeError("cross-sections of dimension above 3 are not supported")
    if d == 1:
        sol = _solve_single_component(problem, cfg)
        method = "scalar_newton"
    elif d == 2 and cfg.method in ("auto", "profile"):
        sol = _solve_two_components(problem, cfg)
        method = "reduced_profile"
    else:
        raise ScopeError("three or more components are not solved yet: only the one- and two-component "
                         "reductions are implemented")
    diag = compute_diagnostics(sol, cfg)
    diag.update(sol.diagnostics)
    diag["method"] = method
    sol = AnsatzSolution(problem, sol.representation, diag)
    if not np.isfinite(diag["pde_residual_sup"]) or diag["pde_residual_sup"] > cfg.tol_r:
        raise ConvergenceError(
            f"interior residual {diag['pde_residual_sup']:.3g} exceeds tol_r={cfg.tol_r:g}",
            residual=diag["pde_residual_sup"], solution=sol)
    return sol
