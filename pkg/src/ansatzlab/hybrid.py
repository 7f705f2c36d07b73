"""Scaling statements for degenerating families, on model potentials.

A potential is modelled by a homogeneous leading term u evaluated along a
path z(t) with z(t)/log(1/t) -> slopes, plus correction terms bounded by
B_j * log(1/t)**e_j with e_j < alpha. Everything is parametrised by
L = log(1/t), so very small t (such as exp(-1e4)) can be used without
underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .convex_core.functions import SmoothConvexBase
from .errors import InputError

__all__ = [
    "ModelHybridPotential", "rescaled_limit", "degree_from_measure_scaling",
    "odaka_check", "measure_normalization",
]


@dataclass(frozen=True)
class ModelHybridPotential:
    alpha: Fraction
    leading: tuple
    u: SmoothConvexBase
    corrections: tuple = ()  # pairs (bound, exponent)

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        lead = tuple(float(x) for x in self.leading)
        if len(lead) != self.u.dim:
            raise InputError(f"need {self.u.dim} limit slopes, got {len(lead)}")
        if not all(np.isfinite(lead)) or min(lead) < 0:
            raise InputError("limit slopes must be finite and nonnegative")
        object.__setattr__(self, "leading", lead)
        corr = tuple((float(b), float(e)) for b, e in self.corrections)
        for b, e in corr:
            if not np.isfinite(b):
                raise InputError("correction bounds must be finite")
            if e >= float(alpha):
                raise InputError(f"correction exponent {e} is not below alpha={alpha}")
        object.__setattr__(self, "corrections", corr)

    def potential(self, log_inv_t: float, path: Optional[Callable] = None) -> float:
        """u(z) plus every correction at its bound, at L = log(1/t)."""
        L = float(log_inv_t)
        z = np.asarray(path(L) if path is not None else np.multiply(self.leading, L), dtype=float)
        value = float(self.u.value(z.reshape(1, -1))[0])
        return value + sum(b * L**e for b, e in self.corrections)

    def target(self) -> float:
        return float(self.u.value(np.asarray(self.leading).reshape(1, -1))[0])


def _levels(t_list, log_inv_t):
    if (t_list is None) == (log_inv_t is None):
        raise InputError("give exactly one of t_list and log_inv_t")
    if t_list is not None:
        t = np.asarray(t_list, dtype=float)
        if t.size == 0 or np.any(t <= 0) or np.any(t >= 1):
            raise InputError("t values must lie in (0, 1)")
        if np.any(np.diff(t) >= 0):
            raise InputError("t_list must be strictly decreasing")
        L = -np.log(t)
    else:
        L = np.asarray(log_inv_t, dtype=float)
        if L.size == 0 or np.any(L <= 0):
            raise InputError("log(1/t) values must be positive")
        if np.any(np.diff(L) <= 0):
            raise InputError("log(1/t) values must be strictly increasing")
    if L[-1] < -math.log(1e-6):
        raise InputError("the family must reach t <= 1e-6")
    return L


def rescaled_limit(model: ModelHybridPotential, t_list=None, log_inv_t=None, path: Optional[Callable] = None,
                   tol: float = 1e-3) -> dict:
    """Ratio potential / log(1/t)**alpha along a family of t.

    Returns the convergence table (rows with log_inv_t, ratio, target,
    abs_error), the last ratio as the numerical limit, the target u(slopes)
    and a verdict on the last error against ``tol``.
    """
    L = _levels(t_list, log_inv_t)
    a = float(model.alpha)
    target = model.target()
    rows = []
    for level in L:
        ratio = model.potential(level, path) / level**a
        rows.append({"log_inv_t": float(level), "ratio": ratio, "target": target, "abs_error": abs(ratio - target)})
    return {"rows": rows, "limit": rows[-1]["ratio"], "target": target,
            "passed": rows[-1]["abs_error"] <= tol}


def degree_from_measure_scaling(n: int, d: int) -> Fraction:
    """The degree alpha with n (alpha - 1) = d."""
    if not 1 <= d <= n:
        raise InputError("need 1 <= d <= n")
    alpha = Fraction(n + d, n)
    assert n * (alpha - 1) == d
    return alpha


def odaka_check(n: int, d: int):
    """Volume-growth dimension 2nd/(n+d) and whether it is at least d."""
    if not 1 <= d <= n:
        raise InputError("need 1 <= d <= n")
    vd = Fraction(2 * n * d, n + d)
    holds = d <= vd
    assert holds == (d <= n)
    return vd, holds


def measure_normalization(n: int, d: int, t: float = None, log_inv_t: float = None):
    """Measure factor (2 pi log(1/t))^-d and potential factor log(1/t)^(-d/n)."""
    if not 1 <= d <= n:
        raise InputError("need 1 <= d <= n")
    if (t is None) == (log_inv_t is None):
        raise InputError("give exactly one of t and log_inv_t")
    if t is not None:
        if not 0 < t < 1:
            raise InputError("t must lie in (0, 1)")
        L = -math.log(t)
    else:
        L = float(log_inv_t)
        if L <= 0:
            raise InputError("log(1/t) must be positive")
    exponent = Fraction(d, n)
    assert exponent == degree_from_measure_scaling(n, d) - 1
    return (2 * math.pi * L) ** (-d), L ** (-float(exponent))
