from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ansatzlab.convex_core import (PiecewiseConvexMax, affine_base, identity_base, mollify, polytope_volume,
                                   quadratic_base)
from ansatzlab.errors import InputError, ScopeError
from ansatzlab.ma_measure import (MeasureEstimate, OrthotopeRegion, hull_volume_linear_in_t, ma_measure_analytic,
                                  ma_measure_green, ma_measure_oracle, softmax_trap_demo)


def max_xy0():
    ident = identity_base()
    return PiecewiseConvexMax.from_maps(2, [([[1, 0]], [0], ident), ([[0, 1]], [0], ident), ([[0, 0]], [0], ident)])


def quadratic_pieces(Q, g=None):
    return PiecewiseConvexMax.from_maps(2, [(np.eye(2), np.zeros(2), quadratic_base(Q, g))])


def test_region_validation():
    with pytest.raises(InputError):
        OrthotopeRegion((0.0, 1.0), (1.0, 0.5))
    box = OrthotopeRegion.from_intervals([(-1, 1), (0, 2)])
    assert box.volume == 4.0
    assert box.contains(np.array([[0.0, 1.0], [2.0, 1.0]])).tolist() == [True, False]


def test_analytic_constant_determinants():
    half_norm = quadratic_base(np.eye(2))
    unit = OrthotopeRegion((0, 0), (1, 1))
    assert ma_measure_analytic(half_norm, unit).mass == pytest.approx(1.0, rel=1e-12)
    diag23 = quadratic_base(np.diag([2.0, 3.0]))
    assert ma_measure_analytic(diag23, unit).mass == pytest.approx(6.0, rel=1e-12)


def test_analytic_against_closed_form_integral():
    # f = (x^4 + y^4)/12 has det Hessian x^2 y^2, integral over [0,1]^2 is 1/9
    from ansatzlab.convex_core import SmoothConvexBase

    f = SmoothConvexBase(2, lambda x: (x[..., 0] ** 4 + x[..., 1] ** 4) / 12,
                         lambda x: x**3 / 3,
                         lambda x: np.einsum("...i,ij->...ij", x**2, np.eye(2)))
    est = ma_measure_analytic(f, OrthotopeRegion((0, 0), (1, 1)))
    assert est.mass == pytest.approx(1 / 9, rel=1e-10)
    assert est.method == "analytic-integral"


def test_oracle_on_max_xy0():
    f = max_xy0()
    whole = ma_measure_oracle(f, OrthotopeRegion((-1, -1), (1, 1)), samples=10000, h=2e-3)
    assert whole.mass == pytest.approx(0.5, abs=0.02)
    corner = ma_measure_oracle(f, OrthotopeRegion((-1, -1), (0, 0)), samples=10000, h=2e-3)
    assert corner.mass == pytest.approx(0.5, abs=0.02)
    assert whole.method == "gradient-image-rasterization"


def test_oracle_single_affine_piece_has_no_mass():
    f = PiecewiseConvexMax.from_maps(2, [(np.eye(2), np.zeros(2), affine_base([1.0, -2.0]))])
    est = ma_measure_oracle(f, OrthotopeRegion((-1, -1), (1, 1)), samples=4000, h=1e-2)
    assert est.mass == 0.0


def test_oracle_matches_analytic_on_quadratic():
    Q = np.array([[2.0, 0.5], [0.5, 1.0]])
    box = OrthotopeRegion((-0.5, -0.3), (0.7, 0.9))
    exact = np.linalg.det(Q) * box.volume
    est = ma_measure_oracle(quadratic_pieces(Q), box, samples=20000, h=5e-3)
    assert abs(est.mass - exact) <= est.error_bound


def test_oracle_is_thread_independent():
    f = max_xy0()
    box = OrthotopeRegion((-1, -1), (1, 1))
    one = ma_measure_oracle(f, box, samples=4000, h=5e-3, seed=3, threads=1)
    four = ma_measure_oracle(f, box, samples=4000, h=5e-3, seed=3, threads=4)
    assert one.to_dict() == four.to_dict()


def test_green_on_mollified_max():
    f = mollify(max_xy0(), 32, shift_axes=())
    est = ma_measure_green(f, OrthotopeRegion((-2, -2), (2, 2)))
    assert est.mass == pytest.approx(0.5, abs=0.02)
    with pytest.raises(ScopeError):
        ma_measure_green(quadratic_base(np.eye(3)), OrthotopeRegion((0, 0, 0), (1, 1, 1)))


def test_softmax_trap():
    rows = softmax_trap_demo([1, 4, 64, 256])
    assert rows[-1]["restricted_mass"] == pytest.approx(1 / 6, abs=0.01)
    for row in rows:
        assert row["total_mass"] == pytest.approx(0.5, abs=0.01)
    # the mass near the origin for small k is still spread out, below 1/6
    assert rows[0]["restricted_mass"] < rows[-1]["restricted_mass"]


def test_polytope_volume_examples():
    assert polytope_volume(np.vstack([np.zeros(3), np.eye(3)]))[1] == pytest.approx(1 / 6)
    cube = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], dtype=float)
    assert polytope_volume(cube) == (3, pytest.approx(1.0))
    leg = 6 ** (1 / 3)
    assert polytope_volume(np.vstack([np.zeros(3), leg * np.eye(3)]))[1] == pytest.approx(1.0)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_hull_volume_is_linear_in_t(n):
    import math

    rows, ratios = hull_volume_linear_in_t(n, [1, 2, Fraction(7, 3), math.factorial(n)])
    assert rows[0]["volume"] == Fraction(1, math.factorial(n))
    assert rows[-1]["volume"] == 1
    assert rows[2]["volume"] == Fraction(7, 3) / math.factorial(n)
    assert all(r == 2 for r in ratios)


def test_measure_estimate_clamps_and_serializes():
    box = OrthotopeRegion((0, 0), (1, 1))
    est = MeasureEstimate(box, -1e-18, "analytic-integral", 1e-12)
    assert est.mass == 0.0
    assert est.to_dict()["method"] == "analytic-integral"


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(-0.9, 0.9))
def test_analytic_mass_of_random_quadratic(a, b, corr):
    off = corr * np.sqrt(a * b)
    Q = np.array([[a, off], [off, b]])
    box = OrthotopeRegion((-0.5, 0.0), (0.5, 2.0))
    est = ma_measure_analytic(quadratic_base(Q), box)
    assert est.mass == pytest.approx(np.linalg.det(Q) * box.volume, rel=1e-10)
