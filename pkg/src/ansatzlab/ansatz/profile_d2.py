"""Cross-section profile for two divisor components.

Writing u = rho**alpha * G(s) with rho = t1 + t2, s = t1/rho and
psi = G**(1/alpha), the equation det(D^2 u) (du/dt1 + du/dt2)**(n-2) = c
reduces to the ODE

    K psi^3 psi'' (2 T)^(n-2) = c,   T = psi - x psi',   x = s - 1/2,

with K = 2 (n+2) alpha^(n-1) / n^2, and the face condition becomes
T(+-1/2) = 0. The symmetric solution is found by integrating a
normalised problem phi(0) = 1, phi'(0) = 0 outward until T vanishes and
rescaling. Close to the end point T is used as the independent variable,
because phi'' blows up there like T^(2-n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..errors import ConvergenceError, InputError

SWITCH_T = 0.5


@dataclass(frozen=True)
class NormalisedProfile:
    """phi on [0, x_end] with T(x_end) = 0, stored as two dense solutions."""

    n: int
    x_switch: float
    x_end: float
    phi_end: float
    slope_end: float
    near: object  # dense output in x on [0, x_switch]
    far: object  # dense output in T on [0, SWITCH_T], state (x, phi, phi')

    def phi(self, X) -> np.ndarray:
        X = np.abs(np.atleast_1d(np.asarray(X, dtype=float)))
        if np.any(X > self.x_end * (1 + 1e-12)):
            raise InputError("argument outside the profile interval")
        out = np.empty_like(X)
        inner = X <= self.x_switch
        if inner.any():
            out[inner] = self.near(X[inner])[0]
        for i in np.flatnonzero(~inner):
            if X[i] >= self.x_end:
                out[i] = self.phi_end
                continue
            T = brentq(lambda T: self.far(T)[0] - X[i], 0.0, SWITCH_T, xtol=1e-16, rtol=1e-15)
            out[i] = self.far(T)[1]
        return out


def integrate_normalised(n: int, rtol: float = 1e-13, atol: float = 1e-14) -> NormalisedProfile:
    if n < 3:
        raise InputError("the two-component profile needs n >= 3")

    def rhs_x(x, y):
        p, q = y
        T = p - x * q
        return [q, 1.0 / (p**3 * (2 * T) ** (n - 2))]

    def reach_switch(x, y):
        return y[0] - x * y[1] - SWITCH_T

    reach_switch.terminal = True
    first = solve_ivp(rhs_x, [0.0, 50.0], [1.0, 0.0], events=reach_switch, method="DOP853",
                      rtol=rtol, atol=atol, dense_output=True)
    if first.status != 1 or not len(first.t_events[0]):
        raise ConvergenceError("profile integration did not reach the switching level")
    x1 = float(first.t_events[0][0])
    p1, q1 = first.y_events[0][0]

    def rhs_T(T, y):
        x, p, q = y
        dx = -(p**3) * (2 * T) ** (n - 2) / x
        return [dx, q * dx, -1.0 / x]

    second = solve_ivp(rhs_T, [SWITCH_T, 0.0], [x1, p1, q1], method="DOP853",
                       rtol=rtol, atol=atol, dense_output=True)
    if second.status != 0:
        raise ConvergenceError("profile integration failed near the face")
    x_end, phi_end, slope_end = second.y[:, -1]
    return NormalisedProfile(n, x1, float(x_end), float(phi_end), float(slope_end), first.sol, second.sol)


def profile_constant(n: int) -> float:
    alpha = (n + 2) / n
    return 2 * (n + 2) * alpha ** (n - 1) / n**2


def cross_section_values(n: int, c: float, s_nodes, profile: NormalisedProfile = None):
    """G(s) = psi(s)**alpha at the requested nodes of [0, 1]."""
    s = np.asarray(s_nodes, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise InputError("cross-section nodes must lie in [0, 1]")
    prof = integrate_normalised(n) if profile is None else profile
    alpha = (n + 2) / n
    K = profile_constant(n)
    scale = (c / (K * (2 * prof.x_end) ** 2)) ** (1.0 / (n + 2))
    X = np.clip(2 * prof.x_end * (s - 0.5), -prof.x_end, prof.x_end)
    psi = scale * prof.phi(X)
    return psi**alpha, prof
