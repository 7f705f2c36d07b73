"""Problem data, solution representations and evaluation.

A solution is stored for the unweighted problem with the effective
constant ``c * prod(b)**2``; the weighted solution is ``u(t) = U(t / b)``.
Two representations exist:

* ``ClosedFormD1``: u = a1 (n t + a2)**((n+1)/n) + a3 (one component).
* ``SimplexGrid``: u = rho**alpha G(t / rho), rho = sum(t), with G known
  at nodes of the cross-section {sum t = 1, t >= 0} and interpolated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from scipy.interpolate import make_interp_spline

from ..convex_core.functions import SmoothConvexBase
from ..errors import DomainError, InputError
from ..serialization import SCHEMA_VERSION, parse_fraction


@dataclass(frozen=True)
class AnsatzProblem:
    """det(D^2 u) (sum b_i du/dt_i)**(n-d) = c on the closed octant of R^d."""

    n: int
    d: int
    c: Fraction
    b: tuple = None

    def __post_init__(self):
        n, d = int(self.n), int(self.d)
        if n < 2:
            raise InputError("n must be at least 2")
        if not 1 <= d < n:
            raise InputError(f"need 1 <= d < n, got n={n}, d={d}")
        c = parse_fraction(self.c) if not isinstance(self.c, float) else Fraction(self.c)
        if c <= 0:
            raise InputError("c must be positive")
        b = tuple(Fraction(1) for _ in range(d)) if self.b is None else tuple(parse_fraction(x) for x in self.b)
        if len(b) != d:
            raise InputError(f"expected {d} weights, got {len(b)}")
        if any(x <= 0 for x in b):
            raise InputError("weights must be positive")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.n + self.d, self.n)

    @property
    def weights(self) -> np.ndarray:
        return np.array([float(x) for x in self.b])

    @property
    def unweighted_c(self) -> Fraction:
        prod = Fraction(1)
        for x in self.b:
            prod *= x
        return self.c * prod**2

    def to_dict(self):
        return {"n": self.n, "d": self.d, "c": float(self.c), "c_exact": self.c, "b": [float(x) for x in self.b],
                "b_exact": list(self.b)}

    @classmethod
    def from_dict(cls, data):
        c = data.get("c_exact", data["c"])
        b = data.get("b_exact", data.get("b"))
        return cls(int(data["n"]), int(data["d"]), parse_fraction(c) if isinstance(c, str) else Fraction(c), b)


@dataclass(frozen=True)
class SolverConfig:
    grid: int = 32
    damping: tuple = (1.0, 0.5, 0.25, 0.125, 0.0625)
    max_iter: int = 50
    tol_r: float = 1e-3
    tol_b: float = 5e-2
    rho_range: tuple = (0.25, 4.0)
    method: str = "auto"

    def __post_init__(self):
        if self.grid < 8:
            raise InputError("grid resolution must be at least 8")
        if self.tol_r <= 0 or self.tol_b <= 0:
            raise InputError("tolerances must be positive")
        if self.max_iter < 1:
            raise InputError("max_iter must be positive")
        lo, hi = self.rho_range
        if not 0 < lo < hi:
            raise InputError("rho_range must satisfy 0 < lo < hi")
        if self.method not in ("auto", "profile"):
            raise InputError(f"unknown method {self.method!r}")


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class ClosedFormD1:
    n: int
    a1: float
    a2: float = 0.0
    a3: float = 0.0
    kind: str = "closed_form_d1"

    def evaluate(self, t, order: int = 2):
        """Value, first and second derivative of the one-variable profile."""
        t = np.asarray(t, dtype=float)
        n = self.n
        arg = n * t + self.a2
        if np.any(arg < -1e-14 * (1 + np.abs(t))):
            raise DomainError("closed form evaluated left of its branch point")
        arg = np.maximum(arg, 0.0)
        p = (n + 1) / n
        val = self.a1 * arg**p + self.a3
        if order == 0:
            return val, None, None
        d1 = self.a1 * (n + 1) * arg ** (1.0 / n)
        if order == 1:
            return val, d1, None
        with np.errstate(divide="ignore"):
            d2 = self.a1 * (n + 1) * arg ** (1.0 / n - 1.0)
        return val, d1, d2

    def to_dict(self):
        return {"kind": self.kind, "n": self.n, "a1": self.a1, "a2": self.a2, "a3": self.a3}


@dataclass(frozen=True)
class SimplexGrid:
    """Cross-section values G on the simplex {sum t = 1}.

    ``nodes`` has shape (N, d) (points on the simplex); ``values`` has
    shape (N,). ``interpolation`` names the rule:

    * ``constant`` (d = 1, a single node),
    * ``quintic_theta_spline`` (d = 2): nodes uniform in theta with
      s = t1 = (1 - cos theta)/2, quintic spline in theta with the face
      derivatives ``end_slopes`` = (dG/ds at s=0, dG/ds at s=1),
    """

    d: int
    nodes: np.ndarray
    values: np.ndarray
    interpolation: str
    resolution: int
    end_slopes: tuple = ()
    extra: dict = field(default_factory=dict)
    kind: str = "simplex_grid"

    @cached_property
    def _spline(self):
        theta = np.arccos(np.clip(1 - 2 * self.nodes[:, 0], -1, 1))
        left = [(1, 0.0), (2, 0.5 * self.end_slopes[0])]
        right = [(1, 0.0), (2, -0.5 * self.end_slopes[1])]
        return make_interp_spline(theta, self.values, k=5, bc_type=(left, right))

    def section(self, y, order: int = 2):
        """G and its derivatives in the first d-1 simplex coordinates.

        ``y`` has shape (..., d-1). Returns (G, dG (..., d-1), d2G (..., d-1, d-1)).
        """
        y = np.asarray(y, dtype=float)
        shape = y.shape[:-1]
        k = self.d - 1
        if self.interpolation == "constant":
            G = np.full(shape, float(self.values[0]))
            return G, np.zeros(shape + (k,)), np.zeros(shape + (k, k))
        if self.interpolation == "quintic_theta_spline":
            return self._section_theta(y[..., 0], order)
        raise InputError(f"unknown interpolation {self.interpolation!r}")

    def _section_theta(self, s, order):
        s = np.clip(s, 0.0, 1.0)
        theta = np.arccos(1 - 2 * s)
        sp = self._spline
        G = sp(theta)
        if order == 0:
            return G, None, None
        w = np.sqrt(s * (1 - s))  # ds/dtheta
        g1 = sp(theta, 1)
        g2 = sp(theta, 2)
        near0 = theta < 1e-4
        near1 = (np.pi - theta) < 1e-4
        with np.errstate(divide="ignore", invalid="ignore"):
            Gs = g1 / w
            # g1 / w is 0/0 at the faces; use its Taylor expansion there
            Gs = np.where(near0, 2 * sp(0.0, 2) + sp(0.0, 3) * theta, Gs)
            Gs = np.where(near1, -2 * sp(np.pi, 2) + sp(np.pi, 3) * (np.pi - theta), Gs)
            Gss = (g2 - Gs * (1 - 2 * s) / 2) / w**2
        return G, Gs[..., None], Gss[..., None, None]

    def to_dict(self):
        out = {
            "kind": self.kind,
            "d": self.d,
            "interpolation": self.interpolation,
            "resolution": self.resolution,
            "nodes": self.nodes.tolist(),
            "values": self.values.tolist(),
            "end_slopes": list(self.end_slopes),
        }
        if self.extra:
            out["extra"] = self.extra
        return out


def representation_from_dict(data):
    kind = data["kind"]
    if kind == "closed_form_d1":
        return ClosedFormD1(int(data["n"]), float(data["a1"]), float(data["a2"]), float(data["a3"]))
    if kind == "simplex_grid":
        return SimplexGrid(
            int(data["d"]),
            np.asarray(data["nodes"], dtype=float).reshape(-1, int(data["d"])),
            np.asarray(data["values"], dtype=float),
            data["interpolation"],
            int(data["resolution"]),
            tuple(float(x) for x in data.get("end_slopes", ())),
            data.get("extra", {}),
        )
    raise InputError(f"unknown representation kind {kind!r}")


# ---------------------------------------------------------------------------
# homogeneous reconstruction


def reconstruct(alpha, t, rho, G, dG, d2G, order=2):
    """Value, gradient and Hessian of rho**alpha * G(y), y = t[:d-1]/rho.

    ``dG``/``d2G`` are derivatives in y. With a_i = sum_j dG_j (delta_ij - y_j)
    the gradient is rho^(alpha-1) (alpha G + a_i) and the Hessian is
    rho^(alpha-2) [alpha(alpha-1) G + (alpha-1)(a_i + a_k) + (B^T d2G B)_ik].
    """
    d = t.shape[-1]
    k = d - 1
    val = rho**alpha * G
    if order == 0:
        return val, None, None
    y = t[..., :k] / rho[..., None]
    # B[j, i] = delta_ij - y_j  for j < d-1, i < d
    B = np.zeros(t.shape[:-1] + (k, d))
    if k:
        B[..., :, :k] = np.eye(k)
        B = B - y[..., :, None]
    a = np.einsum("...j,...ji->...i", dG, B) if k else np.zeros(t.shape)
    ones = np.ones(d)
    grad = rho[..., None] ** (alpha - 1) * (alpha * G[..., None] * ones + a)
    if order == 1:
        return val, grad, None
    H = alpha * (alpha - 1) * G[..., None, None] * np.ones((d, d))
    H = H + (alpha - 1) * (a[..., None, :] + a[..., :, None])
    if k:
        H = H + np.einsum("...ji,...jl,...lm->...im", B, d2G, B)
    H = rho[..., None, None] ** (alpha - 2) * H
    return val, grad, H


# ---------------------------------------------------------------------------
# solution


@dataclass(frozen=True)
class AnsatzSolution:
    problem: AnsatzProblem
    representation: object
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def alpha(self) -> Fraction:
        return self.problem.alpha

    @property
    def n(self) -> int:
        return self.problem.n

    @property
    def d(self) -> int:
        return self.problem.d

    def _prepare(self, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            t = t.reshape(1)
        if t.shape[-1] != self.d:
            raise InputError(f"expected points in R^{self.d}")
        scale = 1e-12 * (1 + np.abs(t).max(axis=-1, initial=0.0))
        if np.any(t < -scale[..., None]):
            raise DomainError("solution is defined on the closed octant only; use extend_to_rd")
        return np.maximum(t, 0.0)

    def evaluate(self, t, order: int = 2):
        """(value, gradient, Hessian) at points of the closed octant."""
        t = self._prepare(t)
        w = self.problem.weights
        tt = t / w
        rep = self.representation
        if isinstance(rep, ClosedFormD1):
            val, d1, d2 = rep.evaluate(tt[..., 0], order)
            grad = None if d1 is None else (d1 / w[0])[..., None]
            H = None if d2 is None else (d2 / w[0] ** 2)[..., None, None]
            return val, grad, H
        alpha = float(self.alpha)
        rho = tt.sum(axis=-1)
        safe = np.where(rho > 0, rho, 1.0)
        y = tt[..., : self.d - 1] / safe[..., None]
        G, dG, d2G = rep.section(y, order)
        val, grad, H = reconstruct(alpha, tt, safe, G, dG, d2G, order)
        origin = rho <= 0
        val = np.where(origin, 0.0, val)
        if grad is not None:
            grad = np.where(origin[..., None], 0.0, grad) / w
        if H is not None:
            H = H / np.outer(w, w)
            H = np.where(origin[..., None, None], np.nan, H)
        return val, grad, H

    def value(self, t):
        return self.evaluate(t, 0)[0]

    __call__ = value

    def gradient(self, t):
        return self.evaluate(t, 1)[1]

    def hessian(self, t):
        return self.evaluate(t, 2)[2]

    def as_base(self) -> SmoothConvexBase:
        """The solution as a base on the closed octant (no extension)."""
        return SmoothConvexBase(self.d, self.value, self.gradient, self.hessian,
                                homogeneity_degree=self.alpha, name="ansatz_solution",
                                spec={"kind": "solution", "extended": False, "solution": self.to_dict()})

    def section_root(self, s, order: int = 2):
        """psi = G**(1/alpha) on the cross-section of the unweighted
        problem, with derivatives in s (two components only)."""
        if self.d != 2 or not isinstance(self.representation, SimplexGrid):
            raise InputError("section_root is defined for two-component grid solutions")
        a = float(self.alpha)
        G, dG, d2G = self.representation.section(np.asarray(s, dtype=float)[..., None], order)
        psi = G ** (1 / a)
        if order == 0:
            return psi, None, None
        g1 = dG[..., 0]
        p1 = psi * g1 / (a * G)
        if order == 1:
            return psi, p1, None
        g2 = d2G[..., 0, 0]
        p2 = (1 / a) * G ** (1 / a - 1) * g2 + (1 / a) * (1 / a - 1) * G ** (1 / a - 2) * g1**2
        return psi, p1, p2

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "problem": self.problem.to_dict(),
            "alpha": self.alpha,
            "representation": self.representation.to_dict(),
            "diagnostics": dict(self.diagnostics),
        }


def solution_from_dict(data) -> AnsatzSolution:
    if int(data.get("schema_version", SCHEMA_VERSION)) != SCHEMA_VERSION:
        raise InputError("unsupported schema version")
    problem = AnsatzProblem.from_dict(data["problem"])
    rep = representation_from_dict(data["representation"])
    return AnsatzSolution(problem, rep, dict(data.get("diagnostics", {})))
