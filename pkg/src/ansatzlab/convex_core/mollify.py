"""Convolution with a compactly supported polynomial bump.

The kernel at scale index k is ``eta_k(y) = s^-n eta((y - centre)/s)``
with ``s = radius / k`` and the product bump
``eta(z) = prod_i C (1 - z_i^2)^4`` on the cube [-1, 1]^n. The centre sits
at ``shift_factor * s`` along each shifted axis, so for ``shift_factor > 1``
the support lies strictly inside the open orthant spanned by those axes.

Convolution integrals use a tensor Gauss-Legendre rule on the cube. The
bump is a polynomial there, so the rule integrates it and its moments
exactly, which a ball-shaped support cut out of a tensor grid would not.
Derivatives are moved onto the kernel, which only needs values of the
source function (the source may have kinks).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import ConstructionError, InputError

PROFILE_POWER = 4


def bump_normaliser(n: int) -> float:
    """1 / integral over [-1, 1]^n of prod (1 - z_i^2)^4."""
    one = 2.0 * math.factorial(PROFILE_POWER) ** 2 * 4**PROFILE_POWER / math.factorial(2 * PROFILE_POWER + 1)
    return 1.0 / one**n


@dataclass(frozen=True)
class BumpKernel:
    """Unit-scale kernel data: support radius, shifted axes and nodes."""

    dim: int
    radius: float = 0.25
    shift_axes: tuple = (0,)
    shift_factor: float = 2.0
    nodes: int = 16

    def __post_init__(self):
        if self.radius <= 0:
            raise InputError("kernel radius must be positive")
        if self.nodes < 2:
            raise InputError("quadrature needs at least 2 nodes per axis")
        if any(a < 0 or a >= self.dim for a in self.shift_axes):
            raise InputError("shift axis out of range")
        if self.shift_axes and self.shift_factor <= 1.0:
            raise ConstructionError(
                "kernel support must lie strictly inside the open orthant: "
                f"shift_factor={self.shift_factor} <= 1 touches the boundary"
            )

    def centre(self, k: int) -> np.ndarray:
        c = np.zeros(self.dim)
        s = self.radius / k
        for a in self.shift_axes:
            c[a] = self.shift_factor * s
        return c

    def support_gap(self, k: int) -> float:
        """Distance from the support to the boundary of the shifted orthant."""
        if not self.shift_axes:
            return -self.radius / k
        return (self.shift_factor - 1.0) * self.radius / k

    def quadrature(self):
        """Nodes z, weights for values, gradients and Hessians, raw mass."""
        n, P = self.dim, PROFILE_POWER
        x, w = np.polynomial.legendre.leggauss(self.nodes)
        q = 1.0 - x**2
        c1 = bump_normaliser(1)
        prof = c1 * q**P
        d1 = -2 * P * c1 * x * q ** (P - 1)
        d2 = c1 * (4 * P * (P - 1) * x**2 * q ** (P - 2) - 2 * P * q ** (P - 1))
        idx = np.stack([g.ravel() for g in np.meshgrid(*([np.arange(self.nodes)] * n), indexing="ij")], axis=-1)
        z = x[idx]
        wts = np.prod(w[idx], axis=1)
        P0, P1, P2 = prof[idx], d1[idx], d2[idx]
        eta = np.prod(P0, axis=1)
        raw_mass = float((wts * eta).sum())
        grad = np.empty((z.shape[0], n))
        hess = np.empty((z.shape[0], n, n))
        for i in range(n):
            others = np.prod(np.delete(P0, i, axis=1), axis=1)
            grad[:, i] = P1[:, i] * others
            hess[:, i, i] = P2[:, i] * others
            for j in range(i + 1, n):
                rest = np.prod(np.delete(P0, [i, j], axis=1), axis=1)
                hess[:, i, j] = hess[:, j, i] = P1[:, i] * P1[:, j] * rest
        w_val = wts * eta / raw_mass
        w_grad = (wts / raw_mass)[:, None] * grad
        w_hess = (wts / raw_mass)[:, None, None] * hess
        return z, w_val, w_grad, w_hess, raw_mass


@dataclass(frozen=True)
class MollifiedFunction:
    """``x -> integral f(x - y) eta_k(y) dy`` evaluated by quadrature."""

    source: Callable
    kernel: BumpKernel
    scale_index: int

    def __post_init__(self):
        if int(self.scale_index) < 1:
            raise InputError("scale index k must be a positive integer")
        z, wv, wg, wh, raw = self.kernel.quadrature()
        object.__setattr__(self, "_z", z)
        object.__setattr__(self, "_wv", wv)
        object.__setattr__(self, "_wg", wg)
        object.__setattr__(self, "_wh", wh)
        object.__setattr__(self, "_raw_mass", raw)

    @property
    def dim(self) -> int:
        return self.kernel.dim

    @property
    def step(self) -> float:
        return self.kernel.radius / self.scale_index

    @property
    def centre(self) -> np.ndarray:
        return self.kernel.centre(self.scale_index)

    @property
    def mass_defect(self) -> float:
        """Quadrature mass of the kernel minus one, before renormalising."""
        return self._raw_mass - 1.0

    def _call_source(self, pts):
        f = self.source
        fn = f.value if hasattr(f, "value") else f
        return np.asarray(fn(pts), dtype=float)

    def _samples(self, x, chunk: int = 20000):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise InputError(f"expected points in R^{self.dim}")
        flat = x.reshape(-1, self.dim)
        base = flat - self.centre
        q = self._z.shape[0]
        per = max(1, chunk // max(q, 1))
        vals = np.empty((flat.shape[0], q))
        centre_vals = np.empty(flat.shape[0])
        for i in range(0, flat.shape[0], per):
            b = base[i : i + per]
            pts = b[:, None, :] - self.step * self._z[None, :, :]
            vals[i : i + per] = self._call_source(pts.reshape(-1, self.dim)).reshape(b.shape[0], q)
            centre_vals[i : i + per] = self._call_source(b)
        return x.shape[:-1], vals, centre_vals

    def value(self, x):
        shape, vals, _ = self._samples(x)
        return (vals @ self._wv).reshape(shape)

    __call__ = value

    def gradient(self, x):
        shape, vals, c0 = self._samples(x)
        g = ((vals - c0[:, None]) @ self._wg) / self.step
        return g.reshape(shape + (self.dim,))

    def hessian(self, x):
        shape, vals, c0 = self._samples(x)
        H = np.einsum("pq,qij->pij", vals - c0[:, None], self._wh) / self.step**2
        return H.reshape(shape + (self.dim, self.dim))

    def lipschitz_shift_bound(self, lipschitz: float) -> float:
        """Largest possible |f_k - f| for an L-Lipschitz source."""
        return lipschitz * (np.linalg.norm(self.centre) + self.step)


def mollify(source, k: int, radius: float = 0.25, shift_axes: Sequence[int] = (0,),
            shift_factor: float = 2.0, nodes: int = 16, dim: int = None) -> MollifiedFunction:
    """Mollify ``source`` (a callable on R^n) at scale index ``k``.

    ``shift_axes`` lists the coordinates of the open orthant the kernel
    must sit in; pass ``()`` for a kernel centred at the origin (used only
    for comparison runs, since it violates the strict-support requirement).
    """
    if dim is None:
        dim = getattr(source, "ambient_dim", None) or getattr(source, "dim", None)
    if dim is None:
        raise InputError("dimension of the source could not be inferred; pass dim=")
    kernel = BumpKernel(int(dim), float(radius), tuple(int(a) for a in shift_axes), float(shift_factor), int(nodes))
    return MollifiedFunction(source, kernel, int(k))
