"""Combinatorial cell model and numerical checks of the per-cell mass identities.

Global coordinates are x_0, ..., x_{m+d}. Indices 0..m are the primed
sections and m+1..m+d the distinguished ones. The potential

    v(x) = max_{j <= m} u(x_{m+1} - x_j, ..., x_{m+d} - x_j)

is invariant under adding a constant to every coordinate, so it is stored
as a plain piecewise maximum on R^{m+d+1}. A cell with index set J is the
octant sigma = {X_i >= 0, i in J} in the copy of R^J obtained by setting
every coordinate outside J to zero (the anchor among them).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations

import numpy as np

from .convex_core.functions import Piece, PiecewiseConvexMax, SmoothConvexBase
from .convex_core.mollify import mollify
from .errors import ConstructionError, DecompositionError, InputError, ModelError
from .ma_measure import OrthotopeRegion, ma_measure_analytic, ma_measure_green, ma_measure_oracle

__all__ = [
    "Cell", "TropicalModel", "TropicalPotential", "CellRestriction", "OracleConfig",
    "build_v", "enumerate_cells", "constant_c", "delta_cell_count", "cell_restriction",
    "step4_classify", "verify_step4", "verify_global_mass", "mollification_leak",
    "reduced_dependence_check", "check_decomposition", "decomposition_mutants",
]


# ---------------------------------------------------------------------------
# model


def default_anchor(J, m: int) -> int:
    """Smallest primed index outside J."""
    for j in range(m + 1):
        if j not in J:
            return j
    raise ModelError(f"cell {tuple(J)} uses every primed index, no anchor is left")


@dataclass(frozen=True)
class Cell:
    J: tuple
    multiplicity: int = 1
    anchor: int = 0

    def distinguished(self, m: int) -> tuple:
        return tuple(i for i in self.J if i > m)

    def primed(self, m: int) -> tuple:
        return tuple(i for i in self.J if i <= m)

    def contains_delta(self, m: int, d: int) -> bool:
        return set(range(m + 1, m + d + 1)).issubset(self.J)

    def mask(self) -> int:
        out = 0
        for i in self.J:
            out |= 1 << i
        return out


@dataclass
class TropicalModel:
    """Index-set model of the cell complex.

    ``cells`` are the top cells (|J| = n, one entry per J, copies counted
    by ``multiplicity``); ``lower_cells`` are the shared faces C_I with
    |I| < n, including the apex (I empty). ``validate`` checks the stated
    invariants; it is not run on construction so that corrupted models can
    be built for negative tests.
    """

    m: int
    n: int
    d: int
    cells: list
    lower_cells: list = field(default_factory=list)

    @property
    def distinguished(self) -> tuple:
        return tuple(range(self.m + 1, self.m + self.d + 1))

    @property
    def ambient_dim(self) -> int:
        return self.m + self.d + 1

    def delta_cells(self):
        return [c for c in self.cells if c.contains_delta(self.m, self.d)]

    @property
    def a(self) -> int:
        return sum(c.multiplicity for c in self.delta_cells())

    def validate(self):
        if self.d < 1 or self.n < self.d or self.m < self.n:
            raise ModelError(f"need 1 <= d <= n <= m, got m={self.m}, n={self.n}, d={self.d}")
        top = self.ambient_dim
        for c in self.cells:
            if len(set(c.J)) != len(c.J) or len(c.J) != self.n:
                raise ModelError(f"cell {c.J} does not have {self.n} distinct indices")
            if any(i < 0 or i >= top for i in c.J):
                raise ModelError(f"cell {c.J} has an index outside 0..{top - 1}")
            if int(c.multiplicity) < 1:
                raise ModelError(f"cell {c.J} has multiplicity {c.multiplicity} < 1")
            if c.anchor in c.J or not 0 <= c.anchor <= self.m:
                raise ModelError(f"cell {c.J} has invalid anchor {c.anchor}")
        if self.a < 1:
            raise ModelError("no cell contains the distinguished indices")
        return self

    def to_dict(self):
        return {
            "m": self.m, "n": self.n, "d": self.d,
            "cells": [{"J": list(c.J), "multiplicity": c.multiplicity, "anchor": c.anchor,
                       "contains_delta": c.contains_delta(self.m, self.d)} for c in self.cells],
            "lower_cells": [list(I) for I in self.lower_cells],
            "a": self.a,
        }


def enumerate_cells(m: int, n: int, d: int, multiplicities=None) -> TropicalModel:
    """All size-n index subsets of {0..m+d} with their shared faces.

    ``multiplicities`` is a mapping from index tuples to counts, or a single
    integer applied to every cell; missing entries default to 1.
    """
    if m < n:
        raise InputError("need m >= n")
    if not 1 <= d <= n:
        raise InputError("need 1 <= d <= n")
    cells = []
    for J in combinations(range(m + d + 1), n):
        if isinstance(multiplicities, int):
            mult = multiplicities
        elif multiplicities:
            mult = int(multiplicities.get(J, 1))
        else:
            mult = 1
        cells.append(Cell(J, mult, default_anchor(J, m)))
    lower = [I for k in range(n) for I in combinations(range(m + d + 1), k)]
    return TropicalModel(m, n, d, cells, lower).validate()


def delta_cell_count(m: int, n: int, d: int) -> int:
    """Number of size-n subsets containing all d distinguished indices."""
    return math.comb(m + 1, n - d)


def constant_c(model: TropicalModel) -> Fraction:
    a = model.a
    if a < 1:
        raise ModelError("a = 0: no cell contains the skeleton")
    return Fraction(math.factorial(model.n - model.d), a)


# ---------------------------------------------------------------------------
# the potential v


@dataclass(frozen=True)
class TropicalPotential:
    """Outer (max of compositions) and inner (u of coordinatewise max) forms."""

    function: PiecewiseConvexMax
    base: SmoothConvexBase
    m: int
    d: int

    @property
    def ambient_dim(self) -> int:
        return self.m + self.d + 1

    def outer(self, x):
        return self.function.value(x)

    __call__ = outer

    def inner(self, x):
        x = np.asarray(x, dtype=float)
        low = x[..., : self.m + 1].min(axis=-1)
        return self.base.value(x[..., self.m + 1:] - low[..., None])


def _as_extended_base(u) -> SmoothConvexBase:
    from .ansatz.extension import extend_to_rd
    from .ansatz.solution import AnsatzSolution

    if isinstance(u, AnsatzSolution):
        return extend_to_rd(u, diagnostics=False).extended
    if isinstance(u, SmoothConvexBase):
        return u
    raise InputError("u must be an AnsatzSolution or a SmoothConvexBase on R^d")


def build_v(u, m: int, d: int = None, probes: int = 1000, seed: int = 0, rtol: float = 1e-12) -> TropicalPotential:
    """Assemble v from an extended solution and check both forms agree.

    Disagreement at a probe means u is not nondecreasing along the diagonal
    and raises :class:`ConstructionError`.
    """
    base = _as_extended_base(u)
    d = base.dim if d is None else int(d)
    if base.dim != d:
        raise InputError(f"u has {base.dim} components, expected {d}")
    if m < 1:
        raise InputError("m must be positive")
    M = m + d + 1
    maps = []
    for j in range(m + 1):
        A = np.zeros((d, M))
        A[np.arange(d), m + 1 + np.arange(d)] = 1.0
        A[:, j] = -1.0
        maps.append((A, np.zeros(d)))
    fn = PiecewiseConvexMax.from_maps(M, maps, base=base, labels=[f"U{j}" for j in range(m + 1)])
    pot = TropicalPotential(fn, base, m, d)
    if probes:
        rng = np.random.default_rng(seed)
        x = rng.uniform(-2.0, 2.0, size=(probes, M))
        a, b = pot.outer(x), pot.inner(x)
        bad = np.abs(a - b) > rtol * np.maximum(1.0, np.abs(a))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise ConstructionError(f"outer and inner forms differ at probe {i} ({a[i]!r} vs {b[i]!r}); "
                                    "u is not nondecreasing along the diagonal")
    return pot


# ---------------------------------------------------------------------------
# restriction to a cell


@dataclass(frozen=True)
class CellRestriction:
    """v on the copy of R^J attached to a cell.

    Coordinates follow the sorted order of ``cell.J``; ``primed_axes`` and
    ``distinguished_axes`` are positions in that order.
    """

    cell: Cell
    r: int
    function: PiecewiseConvexMax
    embedding: np.ndarray
    primed_axes: tuple
    distinguished_axes: tuple
    contains_delta: bool

    @property
    def dim(self) -> int:
        return len(self.cell.J)

    def embed(self, X):
        return np.asarray(X, dtype=float) @ self.embedding.T


def cell_restriction(v: TropicalPotential, cell: Cell) -> CellRestriction:
    m, d = v.m, v.d
    J = tuple(sorted(cell.J))
    if cell.anchor in J or not 0 <= cell.anchor <= m:
        raise ModelError(f"cell {J} has inconsistent anchor {cell.anchor}")
    if any(i < 0 or i > m + d for i in J):
        raise ModelError(f"cell {J} does not fit the potential's index range")
    E = np.zeros((v.ambient_dim, len(J)))
    E[list(J), np.arange(len(J))] = 1.0
    full = v.function.restrict(E)
    keep = [j for j in J if j <= m] + [cell.anchor]
    pieces = []
    for j in keep:
        p = full.pieces[j]
        pieces.append(Piece(p.matrix, p.offset, p.base, "U" if j == cell.anchor else p.label))
    fn = PiecewiseConvexMax(len(J), tuple(pieces))
    primed = tuple(i for i, j in enumerate(J) if j <= m)
    dist = tuple(i for i, j in enumerate(J) if j > m)
    return CellRestriction(Cell(J, cell.multiplicity, cell.anchor), len(dist), fn, E, primed, dist,
                           cell.contains_delta(m, d))


def step4_classify(restriction: CellRestriction, p, act_tol: float = None) -> str:
    """Which of the local cases applies at ``p`` (cell coordinates).

    ``Case1-2``: some piece is inactive. ``Case4``: all active and the cell
    contains the skeleton. ``Case3``: all active, the cell does not. When
    all pieces are active but the primed coordinates are not all zero the
    point lies where every piece coincides off the skeleton closure (for
    example where u vanishes identically); the subgradient set is then a
    single point and the tag ``Flat`` is returned.
    """
    p = np.asarray(p, dtype=float)
    active = restriction.function.active_pieces(p, act_tol)
    if len(active) < len(restriction.function.pieces):
        return "Case1-2"
    tol = 1e-9 * (1 + np.abs(p).max()) if act_tol is None else act_tol
    on_closure = all(abs(p[i]) <= tol for i in restriction.primed_axes) and \
        all(p[i] >= -tol for i in restriction.distinguished_axes)
    if not on_closure:
        return "Flat"
    return "Case4" if restriction.contains_delta else "Case3"


# ---------------------------------------------------------------------------
# mass verification


@dataclass(frozen=True)
class OracleConfig:
    samples: int = 4096
    h: float = 1e-3
    deltas: tuple = (0.05, 0.025)
    seed: int = 0
    threads: int = 1
    rel_tol_cell: float = 0.03
    rel_tol_total: float = 0.05
    eps_factor: float = 1e-3


def _parse_box(R, d):
    if isinstance(R, OrthotopeRegion):
        box = R
    else:
        box = OrthotopeRegion.from_intervals(R)
    if box.dim != d:
        raise InputError(f"the box must have {d} intervals")
    if min(box.lower) <= 0:
        raise InputError("the box must lie in the relative interior of the skeleton (positive lower corner)")
    return box


def slab_region(restriction: CellRestriction, R: OrthotopeRegion, delta: float, m: int) -> OrthotopeRegion:
    """Part of sigma within ``delta`` of the skeleton and lying over R."""
    lo = np.zeros(restriction.dim)
    hi = np.full(restriction.dim, float(delta))
    for ax in restriction.distinguished_axes:
        k = restriction.cell.J[ax] - m - 1
        if restriction.contains_delta:
            lo[ax], hi[ax] = R.lower[k], R.upper[k]
        else:
            lo[ax], hi[ax] = 0.0, R.upper[k]
    return OrthotopeRegion(tuple(lo), tuple(hi))


def _cell_mass(v, cell, R, cfg, chunk_seed):
    res = cell_restriction(v, cell)
    masses, bounds = [], []
    for delta in cfg.deltas:
        region = slab_region(res, R, delta, v.m)
        est = ma_measure_oracle(res.function, region, samples=cfg.samples, h=cfg.h, seed=chunk_seed, threads=1)
        masses.append(est.mass)
        bounds.append(est.error_bound)
    return masses, bounds


def verify_step4(model: TropicalModel, u, R, config: OracleConfig = None) -> dict:
    """Per-cell Monge-Ampere masses of v over slabs above R.

    Each cell containing the skeleton should carry c Leb(R)/(n-d)!, with c
    the model constant; every other cell at most ``eps_factor * Leb(R)``.
    Masses are computed for every slab width in ``config.deltas``; a cell
    passes only if all of them do.
    """
    cfg = OracleConfig() if config is None else config
    model.validate()
    v = u if isinstance(u, TropicalPotential) else build_v(u, model.m, model.d)
    if v.m != model.m or v.d != model.d:
        raise InputError("potential and model disagree on m or d")
    if model.n > 3:
        from .errors import ScopeError
        raise ScopeError("oracle verification covers cells of dimension <= 3")
    box = _parse_box(R, model.d)
    leb = box.volume
    c = constant_c(model)
    expected_delta = float(c) / math.factorial(model.n - model.d) * leb
    eps = cfg.eps_factor * leb

    def work(i):
        return _cell_mass(v, model.cells[i], box, cfg, cfg.seed + i)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(work, range(len(model.cells))))
    else:
        results = [work(i) for i in range(len(model.cells))]
    rows = []
    total = 0.0
    for cell, (masses, bounds) in zip(model.cells, results):
        contains = cell.contains_delta(model.m, model.d)
        if contains:
            ok = all(abs(x - expected_delta) <= cfg.rel_tol_cell * expected_delta for x in masses)
            expected = expected_delta
        else:
            ok = all(x <= eps for x in masses)
            expected = 0.0
        mass = masses[-1]
        total += cell.multiplicity * mass
        rows.append({"J": list(cell.J), "multiplicity": cell.multiplicity, "contains_delta": contains,
                     "mass": mass, "expected": expected, "verdict": "pass" if ok else "fail",
                     "mass_by_delta": masses, "error_bound": bounds[-1]})
    total_ok = abs(total - leb) <= cfg.rel_tol_total * leb
    return {
        "cells": rows, "total": total, "expected_total": leb, "c": c, "a": model.a,
        "deltas": list(cfg.deltas), "total_verdict": "pass" if total_ok else "fail",
        "passed": total_ok and all(r["verdict"] == "pass" for r in rows),
    }


def verify_global_mass(model: TropicalModel, u, R, config: OracleConfig = None) -> dict:
    rep = verify_step4(model, u, R, config)
    c = constant_c(model)
    count_ok = model.a * c == math.factorial(model.n - model.d)
    return {"total": rep["total"], "expected_total": rep["expected_total"], "a": model.a, "c": c,
            "count_identity": count_ok, "passed": count_ok and rep["total_verdict"] == "pass"}


# ---------------------------------------------------------------------------
# mollification


def _smooth_mass(f, E: OrthotopeRegion, tol: float) -> float:
    """Mass of a mollified function: boundary formula in the plane, cubature above."""
    if E.dim == 2:
        return ma_measure_green(f, E).mass
    return ma_measure_analytic(f, E, tol=tol).mass


def _leak_regions(res: CellRestriction, extent: float):
    """Boxes covering [-extent, extent]^n minus sigma, split by where they sit.

    ``outside`` boxes have every distinguished coordinate positive and some
    primed coordinate negative; ``v_region`` boxes have some distinguished
    coordinate negative.
    """
    n = res.dim
    outside, v_region = [], []
    for ax in res.distinguished_axes:
        lo = np.full(n, -extent)
        hi = np.full(n, extent)
        hi[ax] = 0.0
        for prev in res.distinguished_axes:
            if prev < ax:
                lo[prev] = 0.0
        v_region.append(OrthotopeRegion(tuple(lo), tuple(hi)))
    for ax in res.primed_axes:
        lo = np.full(n, -extent)
        hi = np.full(n, extent)
        hi[ax] = 0.0
        for a in res.distinguished_axes:
            lo[a] = 0.0
        for prev in res.primed_axes:
            if prev < ax:
                lo[prev] = 0.0
        outside.append(OrthotopeRegion(tuple(lo), tuple(hi)))
    return outside, v_region


def mollification_leak(restriction: CellRestriction, k_list, extent: float = 1.0, radius: float = 0.25,
                       shift: bool = True, nodes: int = 12, tol: float = 1e-7, inside_box=None) -> list:
    """Monge-Ampere mass of the mollified restriction off sigma, per k.

    With ``shift=True`` the kernel sits in the open orthant of the primed
    coordinates, as the construction requires. ``shift=False`` uses a kernel
    centred at the origin, for comparison only. ``inside_box`` (a list of
    intervals) adds the mass over that part of sigma to each row.
    """
    if not restriction.contains_delta:
        raise InputError("leak is measured on cells containing the skeleton")
    axes = restriction.primed_axes if shift else ()
    if shift and not axes:
        raise ConstructionError("no primed coordinate to shift the kernel into")
    outside, v_region = _leak_regions(restriction, extent)
    rows = []
    for k in k_list:
        k = int(k)
        if k < 1:
            raise InputError("k must be a positive integer")
        f = mollify(restriction.function, k, radius=radius, shift_axes=axes, nodes=nodes, dim=restriction.dim)
        if shift and f.kernel.support_gap(k) <= 0:
            raise ConstructionError("kernel support meets the boundary of the primed orthant")
        out_mass = sum(_smooth_mass(f, E, tol) for E in outside)
        v_mass = sum(_smooth_mass(f, E, tol) for E in v_region)
        row = {"k": k, "leak": out_mass + v_mass, "outside_mass": out_mass, "v_region_mass": v_mass,
               "kernel": "shifted" if shift else "centred"}
        if inside_box is not None:
            row["inside_mass"] = _smooth_mass(f, OrthotopeRegion.from_intervals(inside_box), tol)
        rows.append(row)
    return rows


def reduced_dependence_check(restriction: CellRestriction, k: int = 16, radius: float = 0.25, samples: int = 100,
                             seed: int = 0, box=None, tol: float = 1e-8) -> dict:
    """Off sigma and off the V region, v agrees with the max of the primed pieces.

    That maximum depends on n-1 linear forms only, so its mollification has
    a singular Hessian there. Returns the rank of the stacked piece maps,
    the worst pointwise disagreement on shifted samples and the analytic
    mass of the mollified maximum over ``box``.
    """
    if not restriction.contains_delta:
        raise InputError("the reduced dependence argument applies to cells containing the skeleton")
    n = restriction.dim
    primed_pieces = restriction.function.pieces[:-1]
    w = PiecewiseConvexMax(n, tuple(primed_pieces))
    stacked = np.vstack([p.matrix for p in primed_pieces])
    rank = int(np.linalg.matrix_rank(stacked))
    if box is None:
        lo = np.full(n, 0.05)
        hi = np.full(n, 1.0)
        first = restriction.primed_axes[0]
        lo[first], hi[first] = -1.0, -0.05
        box = OrthotopeRegion(tuple(lo), tuple(hi))
    elif not isinstance(box, OrthotopeRegion):
        box = OrthotopeRegion.from_intervals(box)
    rng = np.random.default_rng(seed)
    f = mollify(w, k, radius=radius, shift_axes=restriction.primed_axes, dim=n)
    x = rng.uniform(box.lower, box.upper, size=(samples, n))
    dirs = rng.normal(size=(samples, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    y = f.centre + dirs * f.step * rng.random((samples, 1))
    pts = x - y
    a = restriction.function.value(pts)
    b = w.value(pts)
    gap = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))
    mass = _smooth_mass(f, box, tol)
    return {"rank": rank, "expected_rank": n - 1, "pointwise_gap": gap, "mollified_mass": mass,
            "box": box.to_dict(), "passed": rank == n - 1 and gap <= 1e-12 and mass <= tol}


# ---------------------------------------------------------------------------
# decomposition


def _popcount(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    y = x.copy()
    while np.any(y):
        out += y & 1
        y >>= 1
    return out


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _indices(mask: int) -> tuple:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def check_decomposition(model: TropicalModel, raise_on_failure: bool = True) -> dict:
    """Check the intersection rules of the cell complex on index sets.

    Top cells must be distinct n-subsets with a valid anchor (the tropical
    map is then a bijection onto the octant); the lower cells must be
    exactly the proper faces of the top cells; and any two distinct cells
    must meet in the union of the faces indexed by subsets of I & J, all
    of which must be present.
    """
    checks = {}

    def fail(msg, pair):
        if raise_on_failure:
            raise DecompositionError(msg, pair)
        return {"passed": False, "failure": msg, "pair": pair, "checks": checks}

    n, m, d = model.n, model.m, model.d
    top_index = m + d
    for c in model.cells:
        J = tuple(c.J)
        if len(set(J)) != n or len(J) != n:
            return fail(f"cell {J} does not have {n} distinct indices", (J, None))
        if any(i < 0 or i > top_index for i in J):
            return fail(f"cell {J} has an index outside 0..{top_index}", (J, None))
        if int(c.multiplicity) < 1:
            return fail(f"cell {J} has multiplicity {c.multiplicity}", (J, None))
        if c.anchor in J or not 0 <= c.anchor <= m:
            return fail(f"cell {J} has anchor {c.anchor}, so its chart is not injective", (J, c.anchor))
    checks["charts_injective"] = True
    if model.a < 1:
        return fail("no cell contains the distinguished indices", None)

    masks = np.array([c.mask() for c in model.cells], dtype=np.int64)
    lower = set()
    for I in model.lower_cells:
        mask = 0
        for i in I:
            mask |= 1 << i
        if mask in lower:
            return fail(f"lower cell {tuple(I)} is listed twice", (tuple(I), tuple(I)))
        lower.add(mask)
    faces = set()
    full = int((1 << (top_index + 1)) - 1)
    for mk in masks.tolist():
        faces.update(s for s in _submasks(mk) if s != mk)
    spurious = lower - faces
    if spurious:
        bad = _indices(min(spurious))
        return fail(f"lower cell {bad} is not a face of any top cell", (bad, None))
    missing = faces - lower
    if missing:
        bad = _indices(min(missing))
        return fail(f"face {bad} of a top cell is missing from the complex", (bad, None))
    checks["face_lattice_closed"] = True

    # pairwise intersections of top cells
    inter = masks[:, None] & masks[None, :]
    iu = np.triu_indices(len(masks), k=1)
    pair_masks = inter[iu]
    counts = _popcount(pair_masks)
    if np.any(counts >= n):
        k = int(np.flatnonzero(counts >= n)[0])
        i, j = int(iu[0][k]), int(iu[1][k])
        return fail("two top cells share all their indices", (tuple(model.cells[i].J), tuple(model.cells[j].J)))
    for mk in np.unique(pair_masks).tolist():
        for s in _submasks(int(mk) & full):
            if s not in lower:
                k = int(np.flatnonzero(pair_masks == mk)[0])
                i, j = int(iu[0][k]), int(iu[1][k])
                return fail(f"face {_indices(s)} of the intersection is absent",
                            (tuple(model.cells[i].J), tuple(model.cells[j].J)))
    checks["top_intersections"] = int(pair_masks.size)

    # top cell against lower cell: C_{I,l} & C_J = C_{I & J}
    low_masks = np.array(sorted(lower), dtype=np.int64)
    mixed = np.unique((masks[:, None] & low_masks[None, :]).ravel())
    absent = [int(x) for x in mixed.tolist() if int(x) not in lower]
    if absent:
        return fail(f"intersection {_indices(absent[0])} with a lower cell is absent", (_indices(absent[0]), None))
    checks["mixed_intersections"] = int(masks.size * low_masks.size)
    return {"passed": True, "failure": None, "pair": None, "checks": checks}


def decomposition_mutants(model: TropicalModel) -> list:
    """Ten corrupted copies of ``model``, each breaking one rule."""
    m, n, d = model.m, model.n, model.d
    cells = list(model.cells)
    c0 = cells[0]
    others = [i for i in range(m + d + 1) if i not in c0.J]
    out = []

    def with_cells(new_cells, lower=None):
        return TropicalModel(m, n, d, new_cells, list(model.lower_cells if lower is None else lower))

    out.append(("anchor_in_J", with_cells([replace(c0, anchor=c0.J[0])] + cells[1:])))
    out.append(("anchor_not_primed", with_cells([replace(c0, anchor=m + 1)] + cells[1:])))
    out.append(("short_cell", with_cells([replace(c0, J=c0.J[:-1])] + cells[1:])))
    out.append(("long_cell", with_cells([replace(c0, J=tuple(sorted(c0.J + (others[-1],))))] + cells[1:])))
    out.append(("duplicate_cell", with_cells(cells + [c0])))
    out.append(("zero_multiplicity", with_cells([replace(c0, multiplicity=0)] + cells[1:])))
    out.append(("negative_multiplicity", with_cells([replace(c0, multiplicity=-1)] + cells[1:])))
    out.append(("index_out_of_range", with_cells([replace(c0, J=c0.J[:-1] + (m + d + 1,))] + cells[1:])))
    lower = list(model.lower_cells)
    drop = max(range(len(lower)), key=lambda i: len(lower[i]))
    out.append(("missing_face", with_cells(cells, lower[:drop] + lower[drop + 1:])))
    out.append(("spurious_face", with_cells(cells, lower + [tuple(range(n))[: n - 1] + (m + d + 1,)])))
    return out
