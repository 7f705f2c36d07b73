"""Powers of perspective functions: t -> (rho * g(t / rho)) ** alpha with
rho = sum(t), defined on the open half-space {rho > 0}."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import DomainError, InputError, PositivityError
from .functions import SmoothConvexBase


def perspective_power(g: SmoothConvexBase, alpha, samples: int = 256, seed: int = 0,
                      sample_points=None) -> SmoothConvexBase:
    """Homogeneous degree-``alpha`` function built from ``g`` on {sum t = 1}.

    ``g`` receives the full point ``t / rho`` (a vector summing to one) and
    its gradient is taken in ambient coordinates; only the component
    tangent to the hyperplane matters. ``g`` is checked for positivity on
    ``samples`` random points of the standard simplex, or on
    ``sample_points`` if given.
    """
    alpha_q = Fraction(alpha)
    if alpha_q <= 1:
        raise InputError("alpha must exceed 1")
    a = float(alpha_q)
    d = g.dim
    if sample_points is None:
        rng = np.random.default_rng(seed)
        sample_points = rng.dirichlet(np.ones(d), size=samples) if d > 1 else np.ones((1, 1))
    gv = g.value(np.asarray(sample_points, dtype=float))
    if np.any(gv <= 0) or not np.all(np.isfinite(gv)):
        raise PositivityError("the cross-section function must be positive")

    def _split(t):
        t = np.asarray(t, dtype=float)
        rho = t.sum(axis=-1)
        if np.any(rho <= 0):
            raise DomainError("perspective power is defined only where sum(t) > 0")
        return t, rho

    def parts(t):
        t, rho = _split(t)
        pi = t / rho[..., None]
        gval = g.value(pi)
        gg = g.gradient(pi)
        tang = (pi * gg).sum(axis=-1)
        F = rho * gval
        dF = gval[..., None] + gg - tang[..., None]
        return t, rho, pi, F, dF, gg

    def value(t):
        t, rho = _split(t)
        return (rho * g.value(t / rho[..., None])) ** a

    def grad(t):
        _, _, _, F, dF, _ = parts(t)
        return a * F[..., None] ** (a - 1) * dF

    def hess(t):
        t, rho, pi, F, dF, _ = parts(t)
        Hg = g.hessian(pi)
        B = np.eye(d) - pi[..., :, None] * np.ones(d)  # B[i, j] = delta_ij - pi_i
        HF = np.einsum("...ki,...kl,...lj->...ij", B, Hg, B) / rho[..., None, None]
        return a * F[..., None, None] ** (a - 1) * HF + a * (a - 1) * F[..., None, None] ** (a - 2) * dF[..., :, None] * dF[..., None, :]

    return SmoothConvexBase(d, value, grad, hess, homogeneity_degree=alpha_q, name="perspective_power")
