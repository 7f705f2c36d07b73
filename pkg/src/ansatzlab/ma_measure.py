"""Alexandrov Monge-Ampere measures of convex functions on boxes.

Three estimators are provided:

* ``ma_measure_analytic``: adaptive tensor Gauss-Legendre cubature of
  det D^2 f, for functions with Hessian access;
* ``ma_measure_oracle``: rasterised volume of the union of subgradient
  sets, for piecewise maxima in dimension <= 3;
* ``polytope_volume`` / ``hull_volume_linear_in_t``: exact polytope
  volumes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
import sympy
from scipy.spatial import ConvexHull, QhullError

from .convex_core.functions import PiecewiseConvexMax, SmoothConvexBase, logsumexp_base
from .convex_core.polytope import exact_simplex_volume, polytope_volume, to_fraction
from .errors import CapabilityError, InputError, ScopeError

__all__ = [
    "OrthotopeRegion", "MeasureEstimate", "ma_measure_analytic", "ma_measure_oracle",
    "ma_measure_green", "softmax_trap_demo", "polytope_volume", "hull_volume_linear_in_t",
]


@dataclass(frozen=True)
class OrthotopeRegion:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in np.atleast_1d(self.lower))
        hi = tuple(float(x) for x in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or not lo:
            raise InputError("lower and upper corners must have the same positive length")
        if any(a > b for a, b in zip(lo, hi)):
            raise InputError("need lower <= upper on every axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_intervals(cls, intervals):
        intervals = list(intervals)
        return cls(tuple(a for a, _ in intervals), tuple(b for _, b in intervals))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.all((x >= self.lower) & (x <= self.upper), axis=-1)

    def to_dict(self):
        return {"lower": list(self.lower), "upper": list(self.upper)}


@dataclass
class MeasureEstimate:
    region: OrthotopeRegion
    mass: float
    method: str
    error_bound: float
    samples: int = 0
    resolution: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("analytic-integral", "gradient-image-rasterization", "exact-polytope", "boundary-integral"):
            raise InputError(f"unknown method tag {self.method!r}")
        self.mass = max(0.0, float(self.mass))
        self.error_bound = max(0.0, float(self.error_bound))
        if self.method == "exact-polytope":
            self.error_bound = 0.0

    def to_dict(self):
        return {
            "region": self.region.to_dict(),
            "mass": self.mass,
            "method": self.method,
            "error_bound": self.error_bound,
            "samples": self.samples,
            "resolution": self.resolution,
        }

    def csv_row(self, label: str = ""):
        return [label or str(self.region.to_dict()), self.method, self.mass, self.error_bound, self.samples, self.resolution]


CSV_COLUMNS = ["region", "method", "mass", "error_bound", "samples", "resolution"]


# ---------------------------------------------------------------------------
# analytic cubature


def _hessian_callable(f, allow_fd: bool):
    if isinstance(f, SmoothConvexBase) and not f.has_analytic_hessian and not allow_fd:
        raise CapabilityError("the function has no analytic Hessian (pass allow_fd=True to difference values)")
    if not hasattr(f, "hessian"):
        raise CapabilityError("the function offers no Hessian access")
    return f.hessian


def ma_measure_analytic(f, E: OrthotopeRegion, nodes: int = 6, tol: float = 1e-7, max_depth: int = 12,
                        max_panels: int = 200000, allow_fd: bool = False) -> MeasureEstimate:
    """Integral of det D^2 f over the box by adaptive cubature.

    Each panel is integrated with a ``nodes``-point tensor rule and again
    on its 2^n halves; the difference is the panel's error estimate. Panels
    whose estimate exceeds their share of ``tol`` are split. The reported
    error bound is the sum of the estimates of the accepted panels.
    """
    hess = _hessian_callable(f, allow_fd)
    n = E.dim
    x, w = np.polynomial.legendre.leggauss(nodes)
    ref = np.array(list(product(x, repeat=n)))  # in [-1, 1]^n
    wref = np.prod(np.array(list(product(w, repeat=n))), axis=1)
    corners = np.array(list(product([0, 1], repeat=n)), dtype=float)
    total_vol = E.volume
    if total_vol == 0:
        return MeasureEstimate(E, 0.0, "analytic-integral", 0.0, 0, 0.0)

    def integrate(lo, hi):
        # lo, hi: (P, n) panel corners -> (P,) integrals
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = mid[:, None, :] + half[:, None, :] * ref[None]
        H = hess(pts.reshape(-1, n)).reshape(lo.shape[0], ref.shape[0], n, n)
        det = np.linalg.det(H) if n > 1 else H[..., 0, 0]
        jac = np.prod(half, axis=1)
        return (det * wref).sum(axis=1) * jac

    lo = np.array([E.lower])
    hi = np.array([E.upper])
    coarse = integrate(lo, hi)
    mass = 0.0
    err = 0.0
    evaluated = lo.shape[0]
    for depth in range(max_depth + 1):
        if lo.shape[0] == 0:
            break
        mid = 0.5 * (lo + hi)
        clo = (lo[:, None, :] * (1 - corners) + mid[:, None, :] * corners).reshape(-1, n)
        chi = (mid[:, None, :] * (1 - corners) + hi[:, None, :] * corners).reshape(-1, n)
        child = integrate(clo, chi).reshape(lo.shape[0], -1)
        evaluated += clo.shape[0]
        fine = child.sum(axis=1)
        est = np.abs(fine - coarse)
        share = tol * np.prod(hi - lo, axis=1) / total_vol
        done = (est <= share) | (depth == max_depth) | (evaluated + 2**n * clo.shape[0] > max_panels)
        mass += fine[done].sum()
        err += est[done].sum()
        keep = ~done
        lo = clo.reshape(lo.shape[0], -1, n)[keep].reshape(-1, n)
        hi = chi.reshape(hi.shape[0], -1, n)[keep].reshape(-1, n)
        coarse = child[keep].reshape(-1)
    return MeasureEstimate(E, mass, "analytic-integral", err, evaluated * ref.shape[0], float(nodes),
                           {"raw_mass": float(mass)})


def ma_measure_green(f, E: OrthotopeRegion, points_per_edge: int = 4000) -> MeasureEstimate:
    """Area of the gradient image of a planar box, from boundary values only.

    For convex f the gradient map has nonnegative degree, so the measure of
    the box is the area enclosed by the image of its boundary, traversed
    counter-clockwise. That area is computed by the shoelace formula on
    ``points_per_edge`` samples per edge; the error bound is the change
    against half as many samples.
    """
    if E.dim != 2:
        raise ScopeError("the boundary formula is planar")
    if points_per_edge < 8:
        raise InputError("points_per_edge must be at least 8")
    (x0, y0), (x1, y1) = E.lower, E.upper
    corners = np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0)])
    t = np.linspace(0.0, 1.0, points_per_edge, endpoint=False)
    loop = np.concatenate([a + (b - a) * t[:, None] for a, b in zip(corners[:-1], corners[1:])])
    g = f.gradient(loop)

    def shoelace(pts):
        nxt = np.roll(pts, -1, axis=0)
        return 0.5 * float(np.sum(pts[:, 0] * nxt[:, 1] - nxt[:, 0] * pts[:, 1]))

    fine = shoelace(g)
    coarse = shoelace(g[::2])
    return MeasureEstimate(E, fine, "boundary-integral", abs(fine - coarse), loop.shape[0], float(points_per_edge),
                           {"signed_area": fine})


# ---------------------------------------------------------------------------
# rasterisation oracle


def _node_vertices(f: PiecewiseConvexMax, pts, act_tol_rel):
    """Active-piece gradients for many points: list of (k_i, n) arrays."""
    vals = f.piece_values(pts)
    top = vals.max(axis=1)
    tol = act_tol_rel * (1 + np.abs(top))
    active = np.abs(vals - top[:, None]) <= tol[:, None]
    grads = np.stack([p.gradient(pts) for p in f.pieces], axis=1)  # (N, P, n)
    return active, grads


def _rasterise_chunk(cells, clouds, h, origin_idx, shape):
    """Linear dual-cell indices covered by the full-dimensional hulls."""
    n = len(shape)
    found = []
    for pts in clouds:
        if pts.shape[0] <= n:
            continue
        centred = pts - pts.mean(axis=0)
        sv = np.linalg.svd(centred, compute_uv=False)
        if sv[-1] <= 1e-12 * max(1.0, sv[0]) or sv.size < n:
            continue
        try:
            hull = ConvexHull(pts)
        except QhullError:
            continue
        lo = np.ceil(pts.min(axis=0) / h - 0.5).astype(np.int64)
        hi = np.floor(pts.max(axis=0) / h - 0.5).astype(np.int64)
        if np.any(hi < lo):
            continue
        axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
        idx = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        centres = (idx + 0.5) * h
        inside = np.all(centres @ hull.equations[:, :-1].T + hull.equations[:, -1] <= 1e-12, axis=1)
        if inside.any():
            local = idx[inside] - origin_idx
            found.append(np.ravel_multi_index(local.T, shape))
    if found:
        return np.unique(np.concatenate(found))
    return np.zeros(0, dtype=np.int64)


def ma_measure_oracle(f: PiecewiseConvexMax, E: OrthotopeRegion, samples: int = 40000, h: float = 2e-3,
                      seed: int = 0, threads: int = 1, act_tol: float = 1e-9, chunks: int = 16) -> MeasureEstimate:
    """Volume of the union of subgradient sets over E, by rasterisation.

    E is covered by a regular grid of about ``samples`` cells. For each
    cell the convex hull of the subgradient polytopes at its corners and at
    one uniformly jittered interior point is formed; dual-grid cells of
    side ``h`` whose centres fall inside a full-dimensional hull are marked.
    Lower-dimensional hulls mark nothing. The covered volume is the mass;
    the error bound is the volume of the marked/unmarked frontier layer.

    Results depend only on ``seed``: chunk ``j`` draws its jitter from
    ``default_rng([seed, j])`` and chunks are merged by set union.
    """
    n = E.dim
    if n > 3:
        raise ScopeError("the rasterisation oracle supports dimension <= 3")
    if not isinstance(f, PiecewiseConvexMax):
        raise InputError("the oracle needs a piecewise maximum with gradient access")
    if f.ambient_dim != n:
        raise InputError("function and region dimensions differ")
    if h <= 0:
        raise InputError("dual spacing h must be positive")
    per_axis = max(2, int(round(samples ** (1.0 / n))))
    lo = np.array(E.lower)
    hi = np.array(E.upper)
    if np.any(hi <= lo):
        return MeasureEstimate(E, 0.0, "gradient-image-rasterization", 0.0, 0, h)
    axes = [np.linspace(a, b, per_axis + 1) for a, b in zip(lo, hi)]
    node_grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    node_active, node_grads = _node_vertices(f, node_grid, act_tol)
    node_shape = (per_axis + 1,) * n
    cell_ids = np.array(list(product(range(per_axis), repeat=n)))
    offsets = np.array(list(product([0, 1], repeat=n)))
    step = (hi - lo) / per_axis
    n_cells = cell_ids.shape[0]
    bounds = np.linspace(0, n_cells, chunks + 1).astype(int)

    # jitter points per chunk (deterministic per chunk)
    jitter = np.empty((n_cells, n))
    for j in range(chunks):
        a, b = bounds[j], bounds[j + 1]
        rng = np.random.default_rng([seed, j])
        jitter[a:b] = lo + (cell_ids[a:b] + rng.random((b - a, n))) * step
    jit_active, jit_grads = _node_vertices(f, jitter, act_tol)

    all_pts = np.concatenate([node_grads[node_active], jit_grads[jit_active]])
    gmin = np.floor(all_pts.min(axis=0) / h - 0.5).astype(np.int64) - 1
    gmax = np.ceil(all_pts.max(axis=0) / h - 0.5).astype(np.int64) + 1
    shape = tuple(int(x) for x in (gmax - gmin + 1))
    if np.prod(shape, dtype=float) > 5e8:
        raise InputError("dual grid too fine for the gradient range; increase h")

    def clouds_for(a, b):
        out = []
        for ci in range(a, b):
            corner_idx = np.ravel_multi_index((cell_ids[ci] + offsets).T, node_shape)
            parts = [node_grads[k][node_active[k]] for k in corner_idx]
            parts.append(jit_grads[ci][jit_active[ci]])
            out.append(np.concatenate(parts))
        return out

    def work(j):
        a, b = bounds[j], bounds[j + 1]
        return _rasterise_chunk(range(a, b), clouds_for(a, b), h, gmin, shape)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(chunks)))
    else:
        results = [work(j) for j in range(chunks)]
    bitmap = np.zeros(int(np.prod(shape)), dtype=bool)
    for r in results:
        bitmap[r] = True
    bitmap = bitmap.reshape(shape)
    covered = int(bitmap.sum())
    frontier = np.zeros_like(bitmap)
    for ax in range(n):
        diff = np.diff(bitmap.astype(np.int8), axis=ax) != 0
        sl_a = [slice(None)] * n
        sl_b = [slice(None)] * n
        sl_a[ax] = slice(0, -1)
        sl_b[ax] = slice(1, None)
        frontier[tuple(sl_a)] |= diff
        frontier[tuple(sl_b)] |= diff
    cell_vol = h**n
    return MeasureEstimate(E, covered * cell_vol, "gradient-image-rasterization", frontier.sum() * cell_vol,
                           n_cells, h, {"primal_cells_per_axis": per_axis, "dual_cells": covered})


# ---------------------------------------------------------------------------
# paper examples


def softmax_trap_demo(k_list, box=((-1.0, 0.0), (-1.0, 0.0)), tol: float = 1e-8):
    """Restricted and total Monge-Ampere mass of log(e^{kx}+e^{ky}+1)/k.

    Returns a list of dicts with keys k, restricted_mass, restricted_error,
    total_mass, total_error. The total is taken over a square of half-width
    60/k, outside of which the density is below e^-60.
    """
    ks = [int(k) for k in k_list]
    if not ks:
        raise InputError("k_list must be nonempty")
    region = OrthotopeRegion.from_intervals(box)
    rows = []
    for k in ks:
        f = logsumexp_base(k, 2, include_zero=True)
        part = ma_measure_analytic(f, region, nodes=8, tol=tol)
        half = 60.0 / k
        whole = ma_measure_analytic(f, OrthotopeRegion((-half, -half), (half, half)), nodes=8, tol=tol)
        rows.append({"k": k, "restricted_mass": part.mass, "restricted_error": part.error_bound,
                     "total_mass": whole.mass, "total_error": whole.error_bound})
    return rows


def hull_volume_linear_in_t(n: int, t_list):
    """Volume of conv({0} u {t^(1/n) e_i}) for each t, computed exactly.

    Returns (rows, ratios): rows are dicts {t, volume, volume_float} with
    ``volume`` a Fraction whenever t is rational, and ratios holds the
    exact quotient volume(2t)/volume(t) for each t.
    """
    if n < 2:
        raise InputError("n must be at least 2")
    rows = []
    ratios = []

    def exact_volume(t):
        leg = sympy.root(t, n)
        verts = [[0] * n] + [[leg if i == j else 0 for j in range(n)] for i in range(n)]
        return exact_simplex_volume(verts)

    for t in t_list:
        tq = sympy.nsimplify(t) if isinstance(t, float) else sympy.Rational(str(t)) if isinstance(t, (str, Fraction)) else sympy.Integer(t) if isinstance(t, int) else sympy.sympify(t)
        if tq <= 0:
            raise InputError("t must be positive")
        vol = exact_volume(tq)
        vol2 = exact_volume(2 * tq)
        ratio = sympy.simplify(vol2 / vol)
        rows.append({"t": to_fraction(tq), "volume": to_fraction(vol), "volume_float": float(vol)})
        ratios.append(to_fraction(ratio))
    return rows, ratios
