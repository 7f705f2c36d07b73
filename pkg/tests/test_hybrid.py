import math
from fractions import Fraction

import numpy as np
import pytest

from ansatzlab.ansatz import solve_closed_form_d1
from ansatzlab.errors import InputError
from ansatzlab.hybrid import (ModelHybridPotential, degree_from_measure_scaling, measure_normalization, odaka_check,
                              rescaled_limit)


@pytest.fixture(scope="module")
def u_n2():
    return solve_closed_form_d1(2, 9).as_base()


def test_no_corrections_give_a_constant_ratio(u_n2):
    model = ModelHybridPotential(Fraction(3, 2), (1.0,), u_n2)
    out = rescaled_limit(model, log_inv_t=[14.0, 100.0, 1e4])
    for row in out["rows"]:
        assert row["ratio"] == pytest.approx(2 ** 1.5, rel=1e-14)
    assert out["passed"]


def test_bounded_correction_converges(u_n2):
    model = ModelHybridPotential(Fraction(3, 2), (1.0,), u_n2, corrections=((10.0, 0.0),))
    out = rescaled_limit(model, log_inv_t=[10.0, 100.0, 1000.0, 1e4])
    assert abs(out["limit"] - model.target()) <= 1e-3
    errors = [r["abs_error"] for r in out["rows"]]
    assert all(b < a for a, b in zip(errors, errors[1:]))


def test_squaring_t_shrinks_the_error(u_n2):
    # t -> t^2 doubles log(1/t); the error B L^(e - alpha) drops by 2^(e - alpha)
    model = ModelHybridPotential(Fraction(3, 2), (1.0,), u_n2, corrections=((10.0, 0.5),))
    out = rescaled_limit(model, t_list=[1e-7, 1e-14])
    first, second = (r["abs_error"] for r in out["rows"])
    assert second <= 0.6 * first
    assert second / first == pytest.approx(2 ** (0.5 - 1.5), rel=1e-9)


def test_center_inside_gives_zero(u_n2):
    model = ModelHybridPotential(Fraction(3, 2), (0.0,), u_n2, corrections=((3.0, 0.0),))
    out = rescaled_limit(model, log_inv_t=[100.0, 1e4, 1e6])
    assert out["target"] == 0.0
    assert out["limit"] == pytest.approx(0.0, abs=1e-6)


def test_custom_path(u_n2):
    model = ModelHybridPotential(Fraction(3, 2), (2.0,), u_n2)
    out = rescaled_limit(model, log_inv_t=[100.0, 1e4], path=lambda L: np.array([2.0 * L + math.sqrt(L)]))
    assert abs(out["rows"][-1]["ratio"] - model.target()) < abs(out["rows"][0]["ratio"] - model.target())


def test_model_validation(u_n2):
    with pytest.raises(InputError):
        ModelHybridPotential(Fraction(3, 2), (1.0, 1.0), u_n2)
    with pytest.raises(InputError):
        ModelHybridPotential(Fraction(3, 2), (-1.0,), u_n2)
    with pytest.raises(InputError):
        ModelHybridPotential(Fraction(3, 2), (1.0,), u_n2, corrections=((1.0, 1.5),))
    model = ModelHybridPotential(Fraction(3, 2), (1.0,), u_n2)
    with pytest.raises(InputError):
        rescaled_limit(model, t_list=[1e-3, 1e-2])
    with pytest.raises(InputError):
        rescaled_limit(model, t_list=[1e-2, 1e-3])  # never reaches 1e-6
    with pytest.raises(InputError):
        rescaled_limit(model)


def test_degree_from_measure_scaling():
    assert degree_from_measure_scaling(3, 2) == Fraction(5, 3)
    assert degree_from_measure_scaling(4, 4) == 2
    assert degree_from_measure_scaling(2, 1) == Fraction(3, 2)
    for n in range(1, 21):
        for d in range(1, n + 1):
            alpha = degree_from_measure_scaling(n, d)
            assert n * (alpha - 1) == d
    with pytest.raises(InputError):
        degree_from_measure_scaling(2, 3)


def test_odaka_exhaustive():
    assert odaka_check(3, 1) == (Fraction(3, 2), True)
    assert odaka_check(3, 2) == (Fraction(12, 5), True)
    for n in range(1, 21):
        for d in range(1, n + 1):
            vd, holds = odaka_check(n, d)
            assert holds
            assert (vd == d) == (d == n)


def test_measure_normalization():
    meas, pot = measure_normalization(3, 2, t=math.exp(-1))
    assert meas == pytest.approx((2 * math.pi) ** -2, rel=1e-15)
    assert pot == pytest.approx(1.0, rel=1e-15)
    _, pot1 = measure_normalization(5, 1, log_inv_t=32.0)
    assert pot1 == pytest.approx(32.0 ** (-1 / 5), rel=1e-15)
    _, pot2 = measure_normalization(4, 2, log_inv_t=16.0)
    assert pot2 == pytest.approx(16.0 ** (-2 / 4), rel=1e-15)
    with pytest.raises(InputError):
        measure_normalization(3, 2, t=1.5)
