"""Extension of an octant solution to a C^1 function on all of R^d that
vanishes on the half-space {sum t <= 0}.

The construction is ``u_ext(t) = (rho * psi(t1/rho)) ** alpha`` for
rho = sum t > 0 and 0 otherwise, where psi extends the root
``u**(1/alpha)`` of the cross-section values beyond the simplex.

With one component the cross-section is a point and this is just
``u(max(t, 0))``.

With two components psi is continued past each face along the tangent
line whose slope is fixed by the face condition (psi'(1) = 2 psi(1),
psi'(0) = -2 psi(0)). On that stretch the perspective is linear, so the
diagonal derivative vanishes identically there. Further out psi saturates
along a concave exponential tail; this keeps rho * psi(t1/rho) -> 0 as
rho -> 0, which continuity across {sum t = 0} requires. A convex psi
cannot do both (a homogeneous convex function vanishing on that half-space
depends on sum t alone), so the tails trade convexity for continuity in a
cone hugging the hyperplane. The convexity defect is reported, not hidden.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..convex_core.checks import box_sampler, check_c1_across, check_convexity
from ..convex_core.envelope import EnvelopeFunction, lower_convex_envelope
from ..convex_core.functions import SmoothConvexBase, affine_base
from ..convex_core.perspective import perspective_power
from ..errors import ConstructionError, ScopeError
from .solution import AnsatzSolution


@dataclass(frozen=True)
class ExtensionResult:
    extended: SmoothConvexBase
    envelope: EnvelopeFunction
    diagnostics: dict = field(default_factory=dict)
    section: object = None  # callable psi(s) -> (psi, psi', psi'') for two components


@dataclass(frozen=True)
class ExtendedSection:
    """psi on the whole line for two components."""

    psi0: float
    psi1: float
    inner: object  # s -> (psi, psi', psi'') on [0, 1]
    margin: float = 3.0
    tail: float = 1.0

    @property
    def slope0(self) -> float:
        return -2.0 * self.psi0

    @property
    def slope1(self) -> float:
        return 2.0 * self.psi1

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        B, w = self.margin, self.tail
        psi = np.empty_like(s)
        d1 = np.empty_like(s)
        d2 = np.zeros_like(s)
        mid = (s >= 0) & (s <= 1)
        if mid.any():
            p, q, r = self.inner(s[mid])
            psi[mid], d1[mid], d2[mid] = p, q, r
        right = (s > 1) & (s <= 1 + B)
        psi[right] = self.psi1 + self.slope1 * (s[right] - 1)
        d1[right] = self.slope1
        far_r = s > 1 + B
        e = np.exp(-(s[far_r] - 1 - B) / w)
        psi[far_r] = self.psi1 + self.slope1 * B + self.slope1 * w * (1 - e)
        d1[far_r] = self.slope1 * e
        d2[far_r] = -self.slope1 / w * e
        left = (s < 0) & (s >= -B)
        psi[left] = self.psi0 + self.slope0 * s[left]
        d1[left] = self.slope0
        far_l = s < -B
        e = np.exp((s[far_l] + B) / w)
        psi[far_l] = self.psi0 - self.slope0 * B - self.slope0 * w * (1 - e)
        d1[far_l] = self.slope0 * e
        d2[far_l] = self.slope0 / w * e
        return psi, d1, d2


def _extension_two(sol: AnsatzSolution, margin: float, tail: float):
    a = float(sol.alpha)
    w = sol.problem.weights
    if not np.allclose(w, w[0]):
        raise ScopeError("the extension needs equal weights so that the zero half-space is {sum t <= 0}")
    psi_ends = sol.section_root(np.array([0.0, 1.0]), 0)[0]
    if np.any(psi_ends <= 0):
        raise ConstructionError("cross-section root must be positive at the faces")
    sec = ExtendedSection(float(psi_ends[0]), float(psi_ends[1]), lambda s: sol.section_root(s, 2), margin, tail)

    def parts(t):
        t = np.asarray(t, dtype=float) / w
        rho = t.sum(axis=-1)
        pos = rho > 0
        safe = np.where(pos, rho, 1.0)
        s = t[..., 0] / safe
        psi, p1, p2 = sec(np.where(pos, s, 0.5))
        F = np.where(pos, safe * psi, 0.0)
        dF = np.stack([psi + p1 * (1 - s), psi - p1 * s], axis=-1)
        return pos, safe, s, F, dF, p2

    def value(t):
        pos, _, _, F, _, _ = parts(t)
        return np.where(pos, np.maximum(F, 0.0) ** a, 0.0)

    def grad(t):
        pos, _, _, F, dF, _ = parts(t)
        g = a * np.maximum(F, 0.0)[..., None] ** (a - 1) * dF
        return np.where(pos[..., None], g, 0.0) / w

    def hess(t):
        pos, rho, s, F, dF, p2 = parts(t)
        bvec = np.stack([1 - s, -s], axis=-1)
        HF = (p2 / rho)[..., None, None] * bvec[..., :, None] * bvec[..., None, :]
        Fp = np.maximum(F, 1e-300)[..., None, None]
        H = a * Fp ** (a - 1) * HF + a * (a - 1) * Fp ** (a - 2) * dF[..., :, None] * dF[..., None, :]
        return np.where(pos[..., None, None], H, 0.0) / np.outer(w, w)

    base = SmoothConvexBase(2, value, grad, hess, homogeneity_degree=sol.alpha, name="extended_solution",
                            spec={"kind": "solution", "extended": True, "solution": sol.to_dict()})
    grid = np.linspace(-margin, 1 + margin, 801)
    env = lower_convex_envelope(grid, sec(grid)[0])
    return base, env, sec


def _extension_one(sol: AnsatzSolution):
    w = float(sol.problem.weights[0])
    g1 = float(sol.value(np.array([[w]]))[0])  # value at rho = 1 in unweighted units
    root = g1 ** (1.0 / float(sol.alpha))
    inner = perspective_power(affine_base([0.0], root), sol.alpha, sample_points=np.ones((1, 1)))

    def value(t):
        t = np.asarray(t, dtype=float)
        tt = t / w
        pos = tt[..., 0] > 0
        safe = np.where(pos[..., None], tt, 1.0)
        return np.where(pos, inner.value(safe), 0.0)

    def grad(t):
        t = np.asarray(t, dtype=float)
        tt = t / w
        pos = tt[..., 0] > 0
        safe = np.where(pos[..., None], tt, 1.0)
        return np.where(pos[..., None], inner.gradient(safe), 0.0) / w

    def hess(t):
        t = np.asarray(t, dtype=float)
        tt = t / w
        pos = tt[..., 0] > 0
        safe = np.where(pos[..., None], tt, 1.0)
        return np.where(pos[..., None, None], inner.hessian(safe), 0.0) / w**2

    base = SmoothConvexBase(1, value, grad, hess, homogeneity_degree=sol.alpha, name="extended_solution",
                            spec={"kind": "solution", "extended": True, "solution": sol.to_dict()})
    env = lower_convex_envelope(np.array([-1.0, 1.0]), np.array([root, root]))
    return base, env, None


def extend_to_rd(u: AnsatzSolution, margin: float = 3.0, tail: float = 1.0,
                 diagnostics: bool = True, seed: int = 0) -> ExtensionResult:
    """Extend ``u`` by zero across {sum t <= 0}; see the module notes.

    ``margin`` is how far (in the cross-section variable) psi follows the
    tangent lines before the saturating tails of width ``tail`` begin.
    """
    if u.d == 1:
        base, env, sec = _extension_one(u)
    elif u.d == 2:
        base, env, sec = _extension_two(u, margin, tail)
    else:
        raise ScopeError("extension is implemented for one and two components")
    if env.envelope_values.min() <= 0:
        raise ConstructionError("the convex envelope of the cross-section root is not positive")
    diag = {}
    if diagnostics:
        d = u.d
        env_gap = float(np.abs(env.gap()).max())
        conv = check_convexity(base, box_sampler(-np.ones(d), np.ones(d)), trials=4000, tol=1e-9, seed=seed)
        if d == 1:
            probes = np.zeros((1, 1))
        else:
            probes = np.array([[0.0, 0.0], [0.5, -0.5], [-1.0, 1.0], [0.25, -0.25]])
        c1 = check_c1_across(base, probes)
        rng = np.random.default_rng(seed + 1)
        pts = 4 * rng.random((10000, d)) - 2
        diagonal = base.gradient(pts) @ u.problem.weights
        diag = {
            "envelope_gap": env_gap,
            "convexity_worst": conv.worst_violation,
            "c1_gap": c1.extrapolated_gap,
            "diagonal_derivative_min": float(diagonal.min()),
        }
    return ExtensionResult(base, env, diag, sec)
