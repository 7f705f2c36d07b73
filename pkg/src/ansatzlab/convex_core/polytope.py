"""Volumes of convex polytopes given by vertices, plus the subgradient
polytope record.

Volumes are measured inside the affine hull of the vertices, using the
Euclidean metric of the ambient coordinates restricted to that hull. For
hulls spanned by coordinate directions (every case arising from the
piecewise maxima in this package) this coincides with the lattice
normalisation of the ambient coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy
from scipy.spatial import ConvexHull, QhullError

from ..errors import InputError


def affine_hull_basis(vertices, rtol: float = 1e-10):
    """Return (origin, orthonormal basis rows) of the affine hull."""
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    origin = V[0]
    D = V[1:] - origin
    if D.size == 0:
        return origin, np.zeros((0, V.shape[1]))
    scale = max(1.0, float(np.abs(V).max()))
    _, s, vt = np.linalg.svd(D, full_matrices=False)
    rank = int(np.sum(s > rtol * scale * max(1, len(D))))
    return origin, vt[:rank]


def polytope_volume(vertices, rtol: float = 1e-10):
    """(affine hull dimension, volume inside that hull) of conv(vertices).

    A single point gets volume 0. Simplices use the determinant formula;
    other polytopes are triangulated by qhull and the simplex volumes are
    summed.
    """
    V = np.atleast_2d(np.asarray(vertices, dtype=float))
    if V.shape[0] < 1:
        raise InputError("need at least one vertex")
    V = np.unique(V, axis=0)
    origin, basis = affine_hull_basis(V, rtol)
    k = basis.shape[0]
    if k == 0:
        return 0, 0.0
    P = (V - origin) @ basis.T
    if k == 1:
        return 1, float(P.max() - P.min())
    if P.shape[0] == k + 1:
        return k, float(abs(np.linalg.det(P[1:] - P[0])) / math.factorial(k))
    try:
        hull = ConvexHull(P)
    except QhullError:
        return k, 0.0
    return k, float(hull.volume)


def exact_simplex_volume(vertices):
    """Exact k-volume of a k-simplex with exact (sympy-compatible) entries.

    Uses the Gram determinant, so the simplex may sit in a higher ambient
    space. Returns a sympy expression (a Rational for rational input).
    """
    rows = [[sympy.nsimplify(v) if isinstance(v, float) else sympy.sympify(v) for v in row] for row in vertices]
    M = sympy.Matrix(rows)
    E = M[1:, :] - sympy.ones(M.rows - 1, 1) * M[0, :]
    k = E.rows
    if k == 0:
        return sympy.Integer(0)
    if E.cols == k:
        det = E.det()
        vol = sympy.Abs(det) / sympy.factorial(k)
    else:
        vol = sympy.sqrt((E * E.T).det()) / sympy.factorial(k)
    return sympy.simplify(vol)


def to_fraction(expr):
    """Convert a rational sympy value to Fraction, else return it unchanged."""
    expr = sympy.nsimplify(expr) if not isinstance(expr, sympy.Basic) else expr
    if expr.is_Rational:
        return Fraction(int(expr.p), int(expr.q))
    return expr


@dataclass(frozen=True)
class SubgradientPolytope:
    """Convex hull of the gradients of the pieces active at ``point``."""

    point: np.ndarray
    vertices: np.ndarray
    active: tuple
    affine_hull_dim: int
    volume: float

    @classmethod
    def from_vertices(cls, point, vertices, active=()):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        dim, vol = polytope_volume(V)
        return cls(np.asarray(point, dtype=float), V, tuple(active), dim, vol)

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def full_volume(self) -> float:
        """Volume in the ambient dual space: zero unless full-dimensional."""
        return self.volume if self.affine_hull_dim == self.ambient_dim else 0.0

    def extent(self, axes) -> float:
        """Largest |coordinate| over the vertices along the given axes."""
        return float(np.abs(self.vertices[:, list(axes)]).max()) if len(axes) else 0.0
