"""Sampling-based verdicts: midpoint convexity and C^1 matching across a
hyperplane."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import InputError


def _as_callable(f) -> Callable:
    if hasattr(f, "value"):
        return f.value
    return f


@dataclass
class ConvexityReport:
    trials: int
    worst_violation: float
    tol: float
    passed: bool
    worst_pair: Optional[tuple] = None

    def to_dict(self):
        return {"trials": self.trials, "worst_violation": self.worst_violation, "tol": self.tol, "passed": self.passed}


def box_sampler(lower, upper) -> Callable:
    """Uniform sampler on a box, for :func:`check_convexity`."""
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)

    def sample(rng, size):
        return lo + (hi - lo) * rng.random((size, lo.size))

    return sample


def check_convexity(f, sampler: Callable, trials: int = 1000, tol: float = 1e-10,
                    seed: int = 0, relative: bool = True) -> ConvexityReport:
    """Midpoint test f((x+y)/2) <= (f(x)+f(y))/2 + tol on random pairs.

    With ``relative=True`` the violation is divided by ``1 + |f(x)| + |f(y)|``.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    fn = _as_callable(f)
    rng = np.random.default_rng(seed)
    x = np.asarray(sampler(rng, trials), dtype=float)
    y = np.asarray(sampler(rng, trials), dtype=float)
    fx, fy, fm = fn(x), fn(y), fn(0.5 * (x + y))
    viol = fm - 0.5 * (fx + fy)
    if relative:
        viol = viol / (1.0 + np.abs(fx) + np.abs(fy))
    i = int(np.argmax(viol))
    worst = max(0.0, float(viol[i]))
    return ConvexityReport(trials, worst, tol, worst <= tol, (x[i].tolist(), y[i].tolist()))


@dataclass
class C1Report:
    steps: tuple
    gaps: np.ndarray = field(repr=False)
    extrapolated_gap: float = 0.0
    tol: float = 1e-4
    passed: bool = True

    def to_dict(self):
        return {
            "steps": list(self.steps),
            "max_gap_per_step": [float(g) for g in self.gaps.max(axis=0)],
            "extrapolated_gap": self.extrapolated_gap,
            "tol": self.tol,
            "passed": self.passed,
        }


def _aitken(g0, g1, g2):
    """Aitken delta-squared limit of a sequence; falls back to the last term."""
    d1 = g1 - g0
    d2 = g2 - g1
    den = d2 - d1
    out = np.array(g2, dtype=float, copy=True)
    ok = (np.abs(den) > 1e-14 * (np.abs(g0) + np.abs(g1) + np.abs(g2) + 1e-300)) & (d1 * d2 > 0) & (np.abs(d2) < np.abs(d1))
    out[ok] = g2[ok] - d2[ok] ** 2 / den[ok]
    return np.abs(out)


def check_c1_across(f, probes, normal=None, h_seq: Sequence[float] = (4e-3, 2e-3, 1e-3),
                    directions=None, tol: float = 1e-4, plane_tol: float = 1e-12) -> C1Report:
    """Compare one-sided derivatives of ``f`` on both sides of {normal.t = 0}.

    For every probe and direction ``v`` (with ``v.normal > 0``) the
    second-order one-sided differences from the positive side (stepping
    along ``+v``) and from the negative side (stepping along ``-v``) are
    compared. The gap sequence over ``h_seq`` is extrapolated to h = 0 with
    Aitken's process when it converges geometrically; otherwise the gap at
    the smallest step is reported.
    """
    fn = _as_callable(f)
    P = np.atleast_2d(np.asarray(probes, dtype=float))
    dim = P.shape[1]
    nrm = np.ones(dim) if normal is None else np.asarray(normal, dtype=float)
    nrm = nrm / np.linalg.norm(nrm)
    if np.any(np.abs(P @ nrm) > plane_tol * (1 + np.abs(P).max())):
        raise InputError("probe points must lie on the hyperplane")
    if directions is None:
        directions = [nrm] + [np.eye(dim)[i] for i in range(dim) if np.eye(dim)[i] @ nrm > 1e-12]
    dirs = [np.asarray(v, dtype=float) for v in directions]
    if any(v @ nrm <= 0 for v in dirs):
        raise InputError("every direction must point to the positive side")
    if len(h_seq) < 1:
        raise InputError("need at least one step")
    gaps = np.zeros((len(h_seq), len(P) * len(dirs)))
    for a, h in enumerate(h_seq):
        col = 0
        for v in dirs:
            f0 = fn(P)
            fp1, fp2 = fn(P + h * v), fn(P + 2 * h * v)
            fm1, fm2 = fn(P - h * v), fn(P - 2 * h * v)
            dplus = (-3 * f0 + 4 * fp1 - fp2) / (2 * h)
            dminus = (3 * f0 - 4 * fm1 + fm2) / (2 * h)
            gaps[a, col : col + len(P)] = np.abs(dplus - dminus)
            col += len(P)
    if len(h_seq) >= 3:
        limit = _aitken(gaps[-3], gaps[-2], gaps[-1])
    else:
        limit = gaps[-1]
    worst = float(limit.max())
    return C1Report(tuple(float(h) for h in h_seq), gaps, worst, tol, worst <= tol)
