import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from convexdiv.generator import (
    Generator, adjoint, is_midpoint_convex, kl, kl_reverse, limit_at_zero, linear,
    lp_asa_generator, lpsi_example, parse_generator, power, standard_generator, times,
)

GRID = np.logspace(-6, 6, 61)


def library():
    return [kl(), kl_reverse(), power(2), power(3), power(-1), power(0), power(1),
            lp_asa_generator(-1, 2), lp_asa_generator(-3, 2), lp_asa_generator(0, 2),
            lpsi_example(), linear(-1, 2), linear(3, 0.5)]


@pytest.mark.parametrize("f", library(), ids=lambda f: f.label)
def test_library_generators_validate(f):
    assert is_midpoint_convex(f)
    f.validate()
    adjoint(f).validate()


def test_kl_adjoint_is_negative_log():
    fs = adjoint(kl())
    np.testing.assert_allclose(fs(GRID), -np.log(GRID), rtol=1e-12, atol=1e-12)
    assert kl().f_at_zero == 0.0
    assert kl().fstar_at_zero == math.inf


def test_power_adjoint_value():
    assert adjoint(power(0.25, allow_concave=True))(2.0) == pytest.approx(2**0.75, rel=1e-12)
    assert 2**0.75 == pytest.approx(1.681793, abs=1e-6)


@pytest.mark.parametrize("alpha", [-2.0, -1.0, 0.0, 1.0, 1.5, 2.0, 3.0])
def test_power_adjoint_is_complementary_power(alpha):
    fs = adjoint(power(alpha))
    np.testing.assert_allclose(fs(GRID), GRID ** (1 - alpha), rtol=1e-12)
    g = power(1 - alpha) if not 0 < 1 - alpha < 1 else power(1 - alpha, allow_concave=True)
    assert (fs.f_at_zero, fs.fstar_at_zero) == (g.f_at_zero, g.fstar_at_zero)


@pytest.mark.parametrize("f", library(), ids=lambda f: f.label)
def test_adjoint_is_involution(f):
    ff = adjoint(adjoint(f))
    np.testing.assert_allclose(ff(GRID), f(GRID), rtol=1e-12, atol=1e-300)
    assert (ff.f_at_zero, ff.fstar_at_zero) == (f.f_at_zero, f.fstar_at_zero)


def test_adjoint_of_custom_generator_is_involution_numerically():
    f = Generator.custom(lambda t: (t - 1) ** 2, 1.0, math.inf, "chi2")
    fs = adjoint(f)
    np.testing.assert_allclose(fs(GRID), GRID * (1 / GRID - 1) ** 2, rtol=1e-12)
    assert adjoint(fs) is f
    # a freshly built adjoint of the adjoint still agrees pointwise
    rebuilt = Generator(fs.func, fs.f_at_zero, fs.fstar_at_zero, "fs")
    np.testing.assert_allclose(adjoint(rebuilt)(GRID), f(GRID), rtol=1e-12)


def test_endpoint_limits():
    assert (linear(-1, 2).f_at_zero, linear(-1, 2).fstar_at_zero) == (2.0, -1.0)
    psi = lpsi_example()
    assert psi.f_at_zero == math.inf and psi.fstar_at_zero == 0.0
    assert power(2).f_at_zero == 0.0 and power(3).f_at_zero == 0.0
    assert power(-1).f_at_zero == math.inf and power(-1).fstar_at_zero == 0.0


def test_is_decreasing():
    assert linear(-1, 2).is_decreasing
    assert lpsi_example().is_decreasing
    assert kl_reverse().is_decreasing
    assert not kl().is_decreasing
    assert not power(2).is_decreasing


def test_rejects_concave_parameters():
    with pytest.raises(ValueError):
        power(0.5)
    with pytest.raises(ValueError):
        lp_asa_generator(1, 2)
    with pytest.raises(ValueError):
        lp_asa_generator(-2, 2)
    with pytest.raises(ValueError):
        Generator.custom(np.sqrt, 0.0, math.inf, "sqrt")


def test_custom_rejects_wrong_limits():
    with pytest.raises(ValueError):
        Generator.custom(lambda t: t**2, 1.0, math.inf)
    with pytest.raises(ValueError):
        Generator.custom(lambda t: t**2, 0.0, 0.0)


def test_limit_at_zero():
    assert limit_at_zero(lambda t: t * np.log(t)) == pytest.approx(0.0, abs=1e-7)
    assert limit_at_zero(lambda t: -np.log(t)) == math.inf
    assert limit_at_zero(lambda t: 3 + t) == pytest.approx(3.0)


def test_times_convention():
    assert times(0.0, math.inf) == 0.0
    assert times(0.5, 4.0) == 2.0
    assert times(0.5, math.inf) == math.inf


def test_at_uses_stored_limit():
    assert kl().at(0.0) == 0.0
    assert kl().at(math.e) == pytest.approx(math.e)


def test_standard_generator_and_parse():
    assert standard_generator("power", 2)(3.0) == 9.0
    assert parse_generator("linear:-1:2")(1.0) == 1.0
    assert parse_generator("lp_asa:-1", n=2)(8.0) == pytest.approx(8.0 ** -1.0)
    assert parse_generator("kl").label == "kl"
    with pytest.raises(ValueError):
        parse_generator("nope")
    with pytest.raises(ValueError):
        parse_generator("power")
    with pytest.raises(ValueError):
        parse_generator("power:x")


@given(st.floats(-4, 4).filter(lambda a: not 0 < a < 1), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_power_midpoint_convexity(alpha, s, t):
    f = power(alpha)
    assert f(0.5 * (s + t)) <= 0.5 * (f(s) + f(t)) * (1 + 1e-12) + 1e-12


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(1e-3, 1e3))
def test_linear_adjoint_swaps_coefficients(a, b, t):
    assert adjoint(linear(a, b))(t) == pytest.approx(a + b * t, rel=1e-12, abs=1e-12)
