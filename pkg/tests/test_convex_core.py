from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ansatzlab.convex_core import (PiecewiseConvexMax, affine_base, box_sampler, check_c1_across,
                                   check_convexity, exact_simplex_volume, fd_gradient, fd_hessian,
                                   identity_base, logsumexp_base, lower_convex_envelope, mollify,
                                   perspective_power, polytope_volume, positive_power_base, quadratic_base)
from ansatzlab.convex_core.functions import SmoothConvexBase, base_from_spec
from ansatzlab.convex_core.mollify import BumpKernel
from ansatzlab.errors import (ConstructionError, DifferentiabilityError, DomainError, InputError,
                              PositivityError, ScopeError)


def max_xy0():
    ident = identity_base()
    return PiecewiseConvexMax.from_maps(2, [([[1, 0]], [0], ident), ([[0, 1]], [0], ident), ([[0, 0]], [0], ident)])


# --- smooth bases -------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=4, max_size=4), st.floats(0.1, 3))
def test_quadratic_hessian_matches_differences(entries, shift):
    A = np.array(entries).reshape(2, 2)
    Q = A @ A.T + shift * np.eye(2)
    f = quadratic_base(Q)
    x = np.array([[0.3, -0.7]])
    assert np.allclose(f.hessian(x)[0], Q)
    assert np.allclose(fd_gradient(f.value, x)[0], Q @ x[0], atol=1e-7)
    assert np.allclose(fd_hessian(f.value, x)[0], Q, atol=1e-5)


def test_positive_power_and_spec_roundtrip():
    f = positive_power_base(Fraction(3, 2), scale=2.0)
    # 2 * t^(3/2) at t = 4 is 16; zero on the negative axis
    assert f.value(np.array([[4.0]]))[0] == pytest.approx(16.0, rel=1e-14)
    assert f.value(np.array([[-1.0]]))[0] == 0.0
    g = base_from_spec(f.to_dict())
    t = np.linspace(-1, 3, 9)[:, None]
    assert np.array_equal(f.value(t), g.value(t))


def test_logsumexp_is_stable_for_large_k():
    f = logsumexp_base(1e4, 2)
    x = np.array([[0.5, -0.2], [-1.0, -1.0]])
    assert np.allclose(f.value(x), [0.5, 0.0], atol=1e-3)
    assert np.all(np.isfinite(f.hessian(x)))


# --- piecewise maxima ---------------------------------------------------------


def test_max_xy0_subgradient_at_origin_is_half_triangle():
    f = max_xy0()
    assert f.active_pieces(np.zeros(2)) == (0, 1, 2)
    poly = f.subgradient_polytope(np.zeros(2))
    assert poly.affine_hull_dim == 2
    assert poly.volume == pytest.approx(0.5, abs=1e-15)


def test_single_active_piece_gives_point():
    f = max_xy0()
    poly = f.subgradient_polytope(np.array([1.0, 0.2]))
    assert poly.active == (0,)
    assert poly.volume == 0.0


def test_restriction_agrees_with_embedding():
    f = max_xy0()
    E = np.array([[1.0], [2.0]])
    g = f.restrict(E, shift=[0.0, -1.0])
    s = np.linspace(-2, 2, 21)[:, None]
    assert np.allclose(g.value(s), f.value(s @ E.T + [0.0, -1.0]))


def test_piecewise_roundtrip_and_errors():
    f = max_xy0()
    g = PiecewiseConvexMax.from_dict(f.to_dict())
    x = np.random.default_rng(1).normal(size=(50, 2))
    assert np.array_equal(f.value(x), g.value(x))
    with pytest.raises(InputError):
        f.value(np.zeros(3))
    with pytest.raises(InputError):
        f.active_pieces(np.zeros(2), act_tol=-1.0)
    with pytest.raises(InputError):
        positive_power_base(Fraction(1, 2))
    # |y| has no gradient at 0; the base reports that as a NaN
    abs_base = SmoothConvexBase(
        1, lambda y: np.abs(y[..., 0]),
        lambda y: np.where(y == 0, np.nan, np.sign(y)),
    )
    kink = PiecewiseConvexMax.from_maps(1, [([[1.0]], [0.0], abs_base)])
    with pytest.raises(DifferentiabilityError):
        kink.piece_gradients(np.zeros(1))


# --- polytopes ----------------------------------------------------------------


def test_polytope_volumes():
    simplex = np.vstack([np.zeros(3), np.eye(3)])
    assert polytope_volume(simplex) == (3, pytest.approx(1 / 6))
    assert polytope_volume(np.array([[0.0, 0.0], [3.0, 4.0]])) == (1, pytest.approx(5.0))
    assert polytope_volume(np.array([[1.0, 2.0]])) == (0, 0.0)
    cube = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], dtype=float)
    assert polytope_volume(cube)[1] == pytest.approx(1.0)


def test_exact_simplex_volume_is_rational():
    verts = [[0, 0, 0], [2, 0, 0], [0, 3, 0], [0, 0, 1]]
    assert exact_simplex_volume(verts) == 1  # 2*3*1/3!


# --- envelopes ----------------------------------------------------------------


def test_envelope_1d_double_well():
    x = np.linspace(-1.5, 1.5, 301)
    y = (x**2 - 1) ** 2
    env = lower_convex_envelope(x, y)
    inside = np.abs(x) <= 1
    assert np.allclose(env.envelope_values[inside], 0.0, atol=1e-12)
    assert np.allclose(env.envelope_values[~inside], y[~inside], atol=1e-12)
    assert np.all(env.gap() >= -1e-12)


def test_envelope_of_convex_data_is_itself():
    g = np.linspace(-1, 1, 15)
    X, Y = np.meshgrid(g, g, indexing="ij")
    V = X**2 + 0.5 * Y**2
    env = lower_convex_envelope((g, g), V)
    assert np.abs(env.gap()).max() < 1e-12


def test_envelope_scope():
    g = np.linspace(0, 1, 3)
    with pytest.raises(ScopeError):
        lower_convex_envelope((g, g, g, g), np.zeros((3, 3, 3, 3)))
    with pytest.raises(InputError):
        lower_convex_envelope(np.array([0.0]), np.array([1.0]))


# --- perspective --------------------------------------------------------------


def test_perspective_power_homogeneity_and_derivatives():
    g = quadratic_base(np.eye(2), b=1.0)  # 1 + |y|^2 / 2 > 0
    F = perspective_power(g, Fraction(5, 3))
    rng = np.random.default_rng(3)
    t = rng.random((20, 2)) + 0.1
    lam = 2.7
    assert np.allclose(F.value(lam * t), lam ** (5 / 3) * F.value(t), rtol=1e-13)
    assert np.allclose(F.gradient(t), fd_gradient(F.value, t), rtol=1e-7, atol=1e-9)
    assert np.allclose(F.hessian(t), fd_hessian(F.value, t), rtol=1e-5, atol=1e-6)
    assert check_convexity(F, box_sampler([0.05, 0.05], [2, 2]), trials=500).passed


def test_perspective_power_errors():
    with pytest.raises(PositivityError):
        perspective_power(affine_base([1.0, -1.0]), 1.5)
    F = perspective_power(quadratic_base(np.eye(2), b=1.0), 1.5)
    with pytest.raises(DomainError):
        F.value(np.array([[-1.0, 0.5]]))


# --- mollification ------------------------------------------------------------


def test_kernel_weights_are_normalised():
    for dim in (1, 2, 3):
        z, w, wg, wh, raw = BumpKernel(dim, nodes=10).quadrature()
        assert w.sum() == pytest.approx(1.0, abs=1e-13)
        assert raw == pytest.approx(1.0, abs=5e-3)
        assert np.allclose(wg.sum(axis=0), 0.0, atol=1e-12)


def test_mollified_affine_and_quadratic():
    a = affine_base([2.0, -1.0], 0.5)
    f = mollify(a, 8, dim=2)
    x = np.random.default_rng(0).normal(size=(10, 2))
    # symmetric kernel about its centre: the affine function is just shifted
    assert np.allclose(f.value(x), a.value(x - f.centre), atol=1e-13)
    Q = np.array([[2.0, 0.3], [0.3, 1.0]])
    fq = mollify(quadratic_base(Q), 4, dim=2)
    assert np.allclose(fq.hessian(x), Q, atol=1e-9)


def test_kernel_touching_boundary_is_rejected():
    with pytest.raises(ConstructionError):
        BumpKernel(2, shift_factor=1.0)
    assert BumpKernel(2, shift_axes=()).support_gap(4) < 0


# --- sampling checks ----------------------------------------------------------


def test_convexity_check_detects_cubic():
    assert not check_convexity(lambda x: x[..., 0] ** 3, box_sampler([-1], [1]), trials=200).passed
    assert check_convexity(lambda x: np.abs(x[..., 0]), box_sampler([-1], [1]), trials=200).passed


def test_c1_check_separates_kink_from_smooth():
    probes = np.zeros((1, 1))
    assert check_c1_across(lambda x: np.abs(x[..., 0]), probes).extrapolated_gap == pytest.approx(2.0)
    smooth = check_c1_across(lambda x: np.maximum(x[..., 0], 0) ** 2, probes)
    assert smooth.passed and smooth.extrapolated_gap < 1e-8
