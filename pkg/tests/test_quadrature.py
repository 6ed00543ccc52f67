import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.special import ellipe

from convexdiv.body import Ellipsoid, Polytope, SmoothBody2D
from convexdiv.quadrature import (
    cap_rule, circle_rule, extrapolate_limit, fsum, integrate_boundary, interval_rule, sphere3_rule,
)


def test_circle_rule_basics():
    r = circle_rule(16)
    assert r.integrate(np.ones(16)) == pytest.approx(2 * math.pi, rel=1e-15)
    assert r.integrate(r.nodes[:, 0] ** 2) == pytest.approx(math.pi, abs=1e-14)
    theta = np.arctan2(r.nodes[:, 1], r.nodes[:, 0])
    assert r.integrate(1 + 0.1 * np.cos(3 * theta)) == pytest.approx(2 * math.pi, abs=1e-14)
    np.testing.assert_allclose(np.linalg.norm(r.nodes, axis=1), 1.0, rtol=1e-15)
    with pytest.raises(ValueError):
        circle_rule(4)


@pytest.mark.parametrize("level", [4, 16, 96])
def test_sphere3_rule_basics(level):
    r = sphere3_rule(level)
    assert r.weights.sum() == pytest.approx(4 * math.pi, rel=1e-12)
    assert r.integrate(r.nodes[:, 0] ** 2) == pytest.approx(4 * math.pi / 3, rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(r.nodes, axis=1), 1.0, rtol=1e-14)
    assert np.all(r.weights > 0)


def test_sphere3_support_of_ball():
    r = sphere3_rule(24)
    assert r.integrate(Ellipsoid.ball(3, 2.0).support(r.nodes)) == pytest.approx(8 * math.pi, rel=1e-12)


@given(st.floats(0.05, math.pi), st.floats(-1, 1), st.floats(-1, 1), st.floats(0.1, 1))
def test_cap_rule_area(angle, a, b, c):
    r = cap_rule([a, b, c], angle, 24)
    assert r.weights.sum() == pytest.approx(2 * math.pi * (1 - math.cos(angle)), rel=1e-12)
    axis = np.array([a, b, c]) / math.sqrt(a * a + b * b + c * c)
    assert np.all(r.nodes @ axis >= math.cos(angle) - 1e-12)


def test_interval_rule_polynomial():
    x, w = interval_rule(0.0, 1.0, 64)
    assert fsum(w * x**7) == pytest.approx(1 / 8, rel=1e-14)


def test_fsum_propagates_infinity():
    assert fsum([1.0, math.inf]) == math.inf
    assert fsum([1e16, 1.0, -1e16]) == 1.0


def test_disk_perimeter(disk):
    value, err = integrate_boundary(disk, lambda b: np.ones(len(b)))
    assert value == pytest.approx(2 * math.pi, rel=1e-14)
    assert err < 1e-12


def test_ellipse_perimeter_against_elliptic_integral(ellipse):
    exact = 4 * 2.0 * ellipe(1 - 1 / 4)
    assert exact == pytest.approx(9.688448, abs=1e-6)
    value, err = integrate_boundary(ellipse, lambda b: np.ones(len(b)))
    assert value == pytest.approx(exact, rel=1e-13)
    # independent arc-length integral of the parametrisation (2 cos t, sin t)
    arc, _ = quad(lambda t: math.hypot(2 * math.sin(t), math.cos(t)), 0, 2 * math.pi, epsabs=1e-13)
    assert value == pytest.approx(arc, rel=1e-12)


def test_support_integral_over_rounded_polygon_is_twice_area(rounded_square):
    value, _ = integrate_boundary(rounded_square, lambda b: b.support)
    assert value == pytest.approx(2 * rounded_square.volume, rel=1e-13)


def test_total_curvature_on_rounded_polygon_ignores_flats(rounded_square):
    # flat pieces carry curvature 0 (curvature function inf): only arcs count
    value, _ = integrate_boundary(rounded_square, lambda b: b.curvature)
    assert value == pytest.approx(2 * math.pi, rel=1e-13)


def test_integrate_boundary_rejects_polytopes(square):
    with pytest.raises(TypeError):
        integrate_boundary(square, lambda b: np.ones(len(b)))


def test_node_doubling_estimate_bounds_true_error():
    rng = np.random.default_rng(7)
    hits = 0
    trials = 40
    for _ in range(trials):
        a, b = rng.uniform(0.3, 3.0, size=2)
        m = int(rng.choice([16, 24, 32, 48, 64, 96]))
        E = Ellipsoid.from_axes([a, b])
        value, err = integrate_boundary(E, lambda p: p.support / 2, resolution=m)
        true = abs(value - math.pi * a * b)
        hits += true <= err + 1e-13 * value
    assert hits >= 0.95 * trials


def test_extrapolate_limit_examples():
    s = 0.2 * 0.5 ** np.arange(6)
    L, sig = extrapolate_limit(s, 1 + s)
    assert L == pytest.approx(1.0, abs=1e-13) and sig < 1e-12
    L, _ = extrapolate_limit(s, np.full(s.size, math.pi / 4))
    assert L == pytest.approx(math.pi / 4, abs=1e-13)
    L, _ = extrapolate_limit(s, 0.7 - 2 * s + 5 * s**2)
    assert L == pytest.approx(0.7, abs=1e-12)


def test_extrapolate_limit_errors():
    with pytest.raises(ValueError):
        extrapolate_limit([0.2, 0.1], [1.0, 1.0])
    with pytest.raises(ValueError):
        extrapolate_limit([0.1, 0.2, 0.3], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        extrapolate_limit([0.3, 0.2, 0.1], [1.0, math.nan, 1.0])
    with pytest.raises(ValueError):
        extrapolate_limit([0.3, 0.3 - 1e-15, 0.3 - 2e-15], [1.0, 1.0, 1.0])


def test_rules_are_deterministic(trefoil):
    a = integrate_boundary(trefoil, lambda b: b.support * b.curvature)
    b = integrate_boundary(trefoil, lambda b: b.support * b.curvature)
    assert a == b
