"""Smooth convex bases and piecewise maxima of affine compositions.

All callables are vectorised: a base of dimension ``d`` accepts an array of
shape ``(..., d)`` and returns ``(...)`` values, ``(..., d)`` gradients and
``(..., d, d)`` Hessians.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import DifferentiabilityError, InputError


# ---------------------------------------------------------------------------
# finite differences


def fd_step(x: np.ndarray, rel: float = 1e-4) -> np.ndarray:
    """Default step ``1e-4 * (1 + |x|)`` per point (shape ``(...)``)."""
    return rel * (1.0 + np.linalg.norm(x, axis=-1))


def fd_gradient(func: Callable, x, h=None) -> np.ndarray:
    """Centred-difference gradient with one Richardson level."""
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]
    if h is None:
        h = fd_step(x)
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape[:-1])[..., None]
    out = np.empty(x.shape)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = 1.0
        d1 = (func(x + h * e) - func(x - h * e)) / (2 * h[..., 0])
        d2 = (func(x + 2 * h * e) - func(x - 2 * h * e)) / (4 * h[..., 0])
        out[..., i] = (4.0 * d1 - d2) / 3.0
    return out


def fd_hessian(func: Callable, x, h=None, richardson: bool = True) -> np.ndarray:
    """Centred second differences of values, optionally Richardson-improved."""
    x = np.asarray(x, dtype=float)
    dim = x.shape[-1]
    if h is None:
        h = fd_step(x)
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape[:-1])

    def second(step):
        hs = step[..., None]
        f0 = func(x)
        H = np.empty(x.shape + (dim,))
        eye = np.eye(dim)
        for i in range(dim):
            ei = eye[i]
            H[..., i, i] = (func(x + hs * ei) - 2 * f0 + func(x - hs * ei)) / step**2
            for j in range(i + 1, dim):
                ej = eye[j]
                val = (
                    func(x + hs * (ei + ej))
                    - func(x + hs * (ei - ej))
                    - func(x - hs * (ei - ej))
                    + func(x - hs * (ei + ej))
                ) / (4 * step**2)
                H[..., i, j] = val
                H[..., j, i] = val
        return H

    H1 = second(h)
    if not richardson:
        return H1
    H2 = second(2 * h)
    return (4.0 * H1 - H2) / 3.0


# ---------------------------------------------------------------------------
# smooth bases


@dataclass(frozen=True)
class SmoothConvexBase:
    """A convex function on (a subset of) R^d with derivative access.

    ``hess`` may be ``None``; :meth:`hessian` then falls back to finite
    differences of values. ``spec`` is an optional JSON-ready description
    used by the serializer.
    """

    dim: int
    func: Callable
    grad: Optional[Callable] = None
    hess: Optional[Callable] = None
    homogeneity_degree: Optional[Fraction] = None
    name: str = "base"
    spec: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.dim) < 1:
            raise InputError("dim must be a positive integer")

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1)
        if x.shape[-1] != self.dim:
            raise InputError(f"{self.name}: expected last axis {self.dim}, got {x.shape[-1]}")
        return x

    def value(self, x):
        return self.func(self._check(x))

    __call__ = value

    def gradient(self, x):
        x = self._check(x)
        if self.grad is None:
            return fd_gradient(self.func, x)
        return self.grad(x)

    def hessian(self, x):
        x = self._check(x)
        if self.hess is None:
            return fd_hessian(self.func, x)
        return self.hess(x)

    @property
    def has_analytic_hessian(self) -> bool:
        return self.hess is not None

    def to_dict(self) -> dict:
        if self.spec is None:
            raise InputError(f"{self.name} has no serializable description")
        return dict(self.spec)


def identity_base() -> SmoothConvexBase:
    """f(y) = y on the real line."""
    return SmoothConvexBase(
        1,
        lambda y: y[..., 0].copy(),
        lambda y: np.ones_like(y),
        lambda y: np.zeros(y.shape + (1,)),
        homogeneity_degree=Fraction(1),
        name="identity",
        spec={"kind": "identity"},
    )


def affine_base(a: Sequence[float], b: float = 0.0) -> SmoothConvexBase:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = float(b)
    return SmoothConvexBase(
        a.size,
        lambda y: y @ a + b,
        lambda y: np.broadcast_to(a, y.shape).copy(),
        lambda y: np.zeros(y.shape + (a.size,)),
        homogeneity_degree=Fraction(1) if b == 0 else None,
        name="affine",
        spec={"kind": "affine", "a": a.tolist(), "b": b},
    )


def quadratic_base(Q, g=None, b: float = 0.0) -> SmoothConvexBase:
    """f(y) = y.Q.y/2 + g.y + b with Q symmetric positive semidefinite."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    Q = 0.5 * (Q + Q.T)
    dim = Q.shape[0]
    g = np.zeros(dim) if g is None else np.asarray(g, dtype=float).reshape(dim)
    b = float(b)
    return SmoothConvexBase(
        dim,
        lambda y: 0.5 * np.einsum("...i,ij,...j->...", y, Q, y) + y @ g + b,
        lambda y: y @ Q + g,
        lambda y: np.broadcast_to(Q, y.shape[:-1] + Q.shape).copy(),
        homogeneity_degree=Fraction(2) if (not g.any() and b == 0) else None,
        name="quadratic",
        spec={"kind": "quadratic", "Q": Q.tolist(), "g": g.tolist(), "b": b},
    )


def positive_power_base(power, scale: float = 1.0) -> SmoothConvexBase:
    """f(y) = scale * max(y, 0)**power on the line, power > 1 (so C^1)."""
    p = float(Fraction(power)) if not isinstance(power, float) else power
    if p <= 1:
        raise InputError("positive_power needs power > 1")
    scale = float(scale)

    def f(y):
        return scale * np.maximum(y[..., 0], 0.0) ** p

    def g(y):
        return (scale * p * np.maximum(y, 0.0) ** (p - 1)).reshape(y.shape)

    def h(y):
        t = np.maximum(y[..., 0], 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(t > 0, scale * p * (p - 1) * t ** (p - 2), 0.0 if p >= 2 else np.inf)
        val = np.where(y[..., 0] < 0, 0.0, val)
        return val[..., None, None]

    return SmoothConvexBase(
        1,
        f,
        g,
        h,
        homogeneity_degree=Fraction(power) if not isinstance(power, float) else None,
        name="positive_power",
        spec={"kind": "positive_power", "power": str(Fraction(power)) if not isinstance(power, float) else power, "scale": scale},
    )


def logsumexp_base(k: float, dim: int, include_zero: bool = True) -> SmoothConvexBase:
    """f(y) = log(sum exp(k*y_i) [+ 1]) / k, evaluated with a max shift."""
    k = float(k)
    if k <= 0:
        raise InputError("softmax sharpness k must be positive")

    def _stack(y):
        z = k * y
        if include_zero:
            z = np.concatenate([z, np.zeros(z.shape[:-1] + (1,))], axis=-1)
        return z

    def f(y):
        z = _stack(y)
        zmax = z.max(axis=-1)
        return (zmax + np.log(np.exp(z - zmax[..., None]).sum(axis=-1))) / k

    def probs(y):
        z = _stack(y)
        z = z - z.max(axis=-1, keepdims=True)
        e = np.exp(z)
        return (e / e.sum(axis=-1, keepdims=True))[..., :dim]

    def g(y):
        return probs(y)

    def h(y):
        p = probs(y)
        return k * (p[..., :, None] * np.eye(dim) - p[..., :, None] * p[..., None, :])

    return SmoothConvexBase(
        dim, f, g, h, name="logsumexp",
        spec={"kind": "logsumexp", "k": k, "dim": dim, "include_zero": bool(include_zero)},
    )


def base_from_spec(spec: dict) -> SmoothConvexBase:
    """Rebuild a base from its JSON description."""
    kind = spec.get("kind")
    if kind == "identity":
        return identity_base()
    if kind == "affine":
        return affine_base(spec["a"], spec.get("b", 0.0))
    if kind == "quadratic":
        return quadratic_base(spec["Q"], spec.get("g"), spec.get("b", 0.0))
    if kind == "positive_power":
        power = spec["power"]
        return positive_power_base(Fraction(power) if isinstance(power, str) else power, spec.get("scale", 1.0))
    if kind == "logsumexp":
        return logsumexp_base(spec["k"], spec["dim"], spec.get("include_zero", True))
    if kind == "solution":
        # imported lazily: the ansatz module depends on this one
        from ..ansatz import solution_from_dict, extend_to_rd

        sol = solution_from_dict(spec["solution"])
        if spec.get("extended", True):
            return extend_to_rd(sol, diagnostics=False).extended
        return sol.as_base()
    raise InputError(f"unknown base kind {kind!r}")


# ---------------------------------------------------------------------------
# piecewise maxima


@dataclass(frozen=True)
class Piece:
    """``base(matrix @ x + offset)``; ``matrix`` has shape (d, M)."""

    matrix: np.ndarray
    offset: np.ndarray
    base: SmoothConvexBase
    label: str = ""

    def value(self, x):
        return self.base.value(x @ self.matrix.T + self.offset)

    def gradient(self, x):
        g = self.base.gradient(x @ self.matrix.T + self.offset)
        return g @ self.matrix

    def hessian(self, x):
        H = self.base.hessian(x @ self.matrix.T + self.offset)
        return np.einsum("ai,...ab,bj->...ij", self.matrix, H, self.matrix)


@dataclass(frozen=True)
class PiecewiseConvexMax:
    """x -> max_i base_i(A_i x + b_i) on R^M."""

    ambient_dim: int
    pieces: tuple

    def __post_init__(self):
        if not self.pieces:
            raise InputError("at least one piece is required")
        dims = {p.base.dim for p in self.pieces}
        if len(dims) != 1:
            raise InputError("all pieces must share the same base dimension")
        for p in self.pieces:
            if p.matrix.shape != (p.base.dim, self.ambient_dim) or p.offset.shape != (p.base.dim,):
                raise InputError(f"piece {p.label!r} has affine map of wrong shape")

    @classmethod
    def from_maps(cls, ambient_dim, maps, base=None, labels=None):
        """Build from a list of ``(matrix, offset)`` or ``(matrix, offset, base)``."""
        pieces = []
        for i, item in enumerate(maps):
            A = np.atleast_2d(np.asarray(item[0], dtype=float))
            b = np.asarray(item[1], dtype=float).reshape(A.shape[0])
            bs = item[2] if len(item) > 2 else base
            if bs is None:
                raise InputError("a base function is required for every piece")
            label = labels[i] if labels is not None else f"piece{i}"
            pieces.append(Piece(A, b, bs, label))
        return cls(int(ambient_dim), tuple(pieces))

    @property
    def base_dim(self) -> int:
        return self.pieces[0].base.dim

    def _check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1)
        if x.shape[-1] != self.ambient_dim:
            raise InputError(f"expected points in R^{self.ambient_dim}, got last axis {x.shape[-1]}")
        return x

    def piece_values(self, x) -> np.ndarray:
        x = self._check(x)
        return np.stack([p.value(x) for p in self.pieces], axis=-1)

    def value(self, x):
        return self.piece_values(x).max(axis=-1)

    __call__ = value

    def active_pieces(self, x, act_tol=None) -> tuple:
        x = self._check(x)
        if x.ndim != 1:
            raise InputError("active_pieces expects a single point")
        vals = self.piece_values(x)
        top = vals.max()
        if act_tol is None:
            act_tol = 1e-9 * (1.0 + abs(top))
        if act_tol < 0:
            raise InputError("act_tol must be nonnegative")
        idx = np.flatnonzero(np.abs(vals - top) <= act_tol)
        return tuple(int(i) for i in idx)

    def piece_gradients(self, x, indices=None) -> np.ndarray:
        x = self._check(x)
        idx = range(len(self.pieces)) if indices is None else indices
        rows = []
        for i in idx:
            g = self.pieces[i].gradient(x)
            if not np.all(np.isfinite(g)):
                raise DifferentiabilityError(f"piece {self.pieces[i].label!r} is not differentiable at {x.tolist()}")
            rows.append(g)
        return np.array(rows).reshape(len(rows), self.ambient_dim)

    def subgradient_polytope(self, x, act_tol=None):
        from .polytope import SubgradientPolytope

        x = self._check(x)
        active = self.active_pieces(x, act_tol)
        verts = self.piece_gradients(x, active)
        return SubgradientPolytope.from_vertices(x, verts, active)

    def restrict(self, embedding: np.ndarray, shift=None, labels=None) -> "PiecewiseConvexMax":
        """Compose with an affine embedding y -> E y + shift of R^k into R^M."""
        E = np.asarray(embedding, dtype=float)
        s = np.zeros(self.ambient_dim) if shift is None else np.asarray(shift, dtype=float)
        pieces = []
        for i, p in enumerate(self.pieces):
            lab = labels[i] if labels is not None else p.label
            pieces.append(Piece(p.matrix @ E, p.matrix @ s + p.offset, p.base, lab))
        return PiecewiseConvexMax(E.shape[1], tuple(pieces))

    def to_dict(self) -> dict:
        return {
            "kind": "piecewise_max",
            "ambient_dim": self.ambient_dim,
            "pieces": [
                {"label": p.label, "matrix": p.matrix.tolist(), "offset": p.offset.tolist(), "base": p.base.to_dict()}
                for p in self.pieces
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseConvexMax":
        if data.get("kind") != "piecewise_max":
            raise InputError("expected a piecewise_max description")
        cache = {}
        pieces = []
        for item in data["pieces"]:
            key = repr(item["base"])
            if key not in cache:
                cache[key] = base_from_spec(item["base"])
            A = np.atleast_2d(np.asarray(item["matrix"], dtype=float))
            b = np.asarray(item["offset"], dtype=float).reshape(A.shape[0])
            pieces.append(Piece(A, b, cache[key], item.get("label", "")))
        return cls(int(data["ambient_dim"]), tuple(pieces))


def eval_max(f: PiecewiseConvexMax, x) -> float:
    """Value of the piecewise maximum at ``x``."""
    val = f.value(x)
    return float(val) if np.ndim(val) == 0 else val


def active_pieces(f: PiecewiseConvexMax, x, act_tol=None) -> set:
    return set(f.active_pieces(x, act_tol))


def subgradient_polytope(f: PiecewiseConvexMax, x, act_tol=None):
    return f.subgradient_polytope(x, act_tol)
