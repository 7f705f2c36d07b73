"""Lower convex envelope of gridded data on a box of dimension 1 to 3."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from ..errors import InputError, ScopeError


def _lower_hull_1d(x, y):
    """Indices of the lower convex hull of points sorted by x (monotone chain)."""
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull)


@dataclass(frozen=True)
class EnvelopeFunction:
    """Envelope data on a tensor grid.

    ``planes`` holds rows ``(a_1..a_k, c)`` of supporting affine functions
    ``a.x + c`` whose maximum is the envelope (dimension 2 and 3); in one
    dimension ``hull_x``/``hull_y`` store the lower hull vertices and
    evaluation is piecewise linear.
    """

    axes: tuple
    values: np.ndarray
    envelope_values: np.ndarray
    interpolation: str
    hull_x: np.ndarray = None
    hull_y: np.ndarray = None
    planes: np.ndarray = None

    @property
    def dim(self) -> int:
        return len(self.axes)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            x1 = x[..., 0] if (x.ndim >= 1 and x.shape[-1] == 1 and x.ndim > 1) else x
            return np.interp(x1, self.hull_x, self.hull_y)
        if x.shape[-1] != self.dim:
            raise InputError("point dimension does not match the envelope grid")
        return (x @ self.planes[:, :-1].T + self.planes[:, -1]).max(axis=-1)

    def gap(self) -> np.ndarray:
        """input minus envelope at the grid nodes (nonnegative up to rounding)."""
        return self.values - self.envelope_values


def lower_convex_envelope(axes, values) -> EnvelopeFunction:
    """Lower convex envelope of ``values`` sampled on the tensor grid ``axes``.

    ``axes`` is a sequence of 1-d node arrays (one per dimension) and
    ``values`` has the matching grid shape. The envelope is the lower
    boundary of the convex hull of the epigraph sample points.
    """
    if isinstance(axes, np.ndarray) and axes.ndim == 1:
        axes = (axes,)
    axes = tuple(np.asarray(a, dtype=float) for a in axes)
    values = np.asarray(values, dtype=float)
    k = len(axes)
    if k > 3:
        raise ScopeError("envelope computation is limited to dimension <= 3")
    if k == 0:
        raise InputError("need at least one axis")
    if any(a.size < 2 for a in axes):
        raise InputError("each axis needs at least 2 nodes")
    if values.shape != tuple(a.size for a in axes):
        raise InputError("values shape does not match the grid")
    if any(np.any(np.diff(a) <= 0) for a in axes):
        raise InputError("axis nodes must be strictly increasing")

    if k == 1:
        x = axes[0]
        idx = _lower_hull_1d(x, values)
        env = np.interp(x, x[idx], values[idx])
        return EnvelopeFunction(axes, values, env, "piecewise_linear", hull_x=x[idx], hull_y=values[idx])

    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    z = values.ravel()
    # a single point far above the data makes the hull full-dimensional even
    # when all samples are coplanar; it only creates upward-facing facets
    span = float(z.max() - z.min()) + 1.0
    apex = np.concatenate([pts.mean(axis=0), [z.max() + 10.0 * span]])
    cloud = np.vstack([np.column_stack([pts, z]), apex])
    hull = ConvexHull(cloud)
    eq = hull.equations  # normal . p + offset <= 0 inside
    lower = eq[:, k] < -1e-12
    normals = eq[lower]
    # plane z = -(n_x . x + off) / n_z
    slopes = -normals[:, :k] / normals[:, k : k + 1]
    consts = -normals[:, k + 1] / normals[:, k]
    planes = np.column_stack([slopes, consts])
    env = (pts @ planes[:, :-1].T + planes[:, -1]).max(axis=-1)
    return EnvelopeFunction(axes, values, env.reshape(values.shape), "max_of_lower_facets", planes=planes)
