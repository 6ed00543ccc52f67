"""Acceptance suite: one PASS/FAIL line per criterion, with runtime.

Run alone with ``python3 -m pytest tests/test_acceptance.py -v`` (the
verdict lines are printed even though pytest captures output) or as a
script: ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest
from hypothesis import HealthCheck, example, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from convexdiv import (
    Ellipsoid,
    Polytope,
    SmoothBody2D,
    adjoint,
    check_gl_invariance,
    check_valuation,
    divergence_via_limit,
    f_divergence,
    kl,
    limit_estimate,
    lp_asa,
    mixed_divergence,
    power,
)

TWO_PI = 2.0 * math.pi
GENERATORS = {"t^2": power(2), "t^3": power(3), "t ln t": kl(), "t^-1": power(-1)}


def _verdict(capsys, number: int, title: str, ok: bool, detail: str, elapsed: float, budget: float):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    line = f"criterion {number:2d} {status}  {title}: {detail}  [{elapsed:.2f} s, budget {budget:g} s]"
    with capsys.disabled():
        print("\n" + line, flush=True)
    assert ok, line
    assert elapsed < budget, line


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def test_ellipse_law(capsys):
    start = time.perf_counter()
    worst_exact, worst_quad, bad = 0.0, 0.0, []
    for a, b in [(1, 1), (2, 1), (3, 0.5)]:
        E = Ellipsoid.from_axes([a, b])
        for name, f in GENERATORS.items():
            target = float(f(1.0))
            for d in ("pq", "qp"):
                exact = f_divergence(f, E, d)
                forced = f_divergence(f, E, d, force_quadrature=True)
                worst_exact = max(worst_exact, abs(exact.value - target), exact.error_estimate)
                worst_quad = max(worst_quad, _rel(forced.value, target))
                if exact.branch != "exact_ellipsoid" or exact.value != target or exact.error_estimate != 0:
                    bad.append(f"exact {a},{b} {name} {d}")
                if _rel(forced.value, target) > 1e-6:
                    bad.append(f"quadrature {a},{b} {name} {d}")
    elapsed = time.perf_counter() - start
    detail = f"24 cases, exact deviation {worst_exact:.1e}, quadrature deviation {worst_quad:.1e}"
    _verdict(capsys, 1, "ellipses give f(1)", not bad, detail + (f", failing {bad}" if bad else ""),
             elapsed, 5.0)


def test_polytope_law(capsys):
    start = time.perf_counter()
    bodies = {"square": Polytope.cube(2), "hexagon": Polytope.regular_polygon(6),
              "cube": Polytope.cube(3)}
    bad, infinite = [], 0
    for bname, P in bodies.items():
        for name, f in GENERATORS.items():
            pq = f_divergence(f, P, "pq")
            qp = f_divergence(f, P, "qp")
            if pq.value != f.f_at_zero or qp.value != adjoint(f).f_at_zero:
                bad.append(f"{bname} {name}")
            infinite += math.isinf(pq.value) + math.isinf(qp.value)
    elapsed = time.perf_counter() - start
    detail = f"12 body/generator pairs, {infinite} infinite values matched"
    _verdict(capsys, 2, "polytopes give f(0) and f*(0)", not bad,
             detail + (f", failing {bad}" if bad else ""), elapsed, 1.0)


def test_lp_affine_surface_area(capsys):
    start = time.perf_counter()
    disk = Ellipsoid.ball(2)
    disk_err = max(max(abs(lp_asa(p, disk).value - TWO_PI),
                       abs(lp_asa(p, disk, force_quadrature=True).value - TWO_PI)) / TWO_PI
                   for p in (-3.0, 1.0, 2.0))
    a, b = 2.0, 1.0
    w = lambda t: math.hypot(a * math.sin(t), b * math.cos(t))  # noqa: E731
    kappa = lambda t: a * b / w(t) ** 3                        # noqa: E731
    oracle = quad(lambda t: kappa(t) ** (1 / 3) * w(t), 0, TWO_PI, epsabs=1e-13)[0]
    E = Ellipsoid.from_axes([a, b])
    ell = [lp_asa(1, E).value, lp_asa(1, E, force_quadrature=True).value]
    ell_err = max(abs(v - oracle) / oracle for v in ell)
    closed_err = abs(oracle - TWO_PI * 2 ** (1 / 3)) / oracle
    elapsed = time.perf_counter() - start
    ok = disk_err <= 1e-10 and ell_err <= 1e-6 and closed_err <= 1e-6
    detail = (f"disk rel err {disk_err:.1e}, ellipse vs arc-length oracle {ell_err:.1e}, "
              f"oracle vs 2pi 2^(1/3) {closed_err:.1e}")
    _verdict(capsys, 3, "L_p affine surface area", ok, detail, elapsed, 5.0)


def test_surface_body_limit(capsys):
    start = time.perf_counter()
    disk, E = Ellipsoid.ball(2), Ellipsoid.from_axes([2, 1])
    cases = [("disk g=1", disk, 1.0, TWO_PI, 0.01), ("disk g=2", disk, 2.0, math.pi / 2, 0.01),
             ("ellipse g=1", E, 1.0, TWO_PI, 0.015)]
    parts, ok = [], True
    for label, K, g, target, tol in cases:
        est = limit_estimate(K, g, s0=0.2, halvings=6, m=1024)
        err = abs(est.value - target) / target
        ok &= err <= tol
        parts.append(f"{label} {est.value:.6f} ({err:.1e})")
    elapsed = time.perf_counter() - start
    _verdict(capsys, 4, "surface-body limit", ok, ", ".join(parts), elapsed, 60.0)


def test_divergence_via_surface_limit(capsys):
    start = time.perf_counter()
    parts, ok = [], True
    for label, K in [("disk", Ellipsoid.ball(2)), ("ellipse", Ellipsoid.from_axes([2, 1]))]:
        direct = f_divergence(power(2), K, "pq").value
        est = divergence_via_limit(K, power(2), "pq")
        err = abs(est.value - direct) / abs(direct)
        ok &= err <= 0.02
        parts.append(f"{label} {est.value:.6f} vs {direct:.6f} ({err:.1e})")
    elapsed = time.perf_counter() - start
    _verdict(capsys, 5, "divergence from the surface-body limit", ok, ", ".join(parts), elapsed, 60.0)


def _random_gl2(rng, max_cond: float = 10.0):
    def rot(t):
        return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])

    s1 = rng.uniform(0.3, 3.0)
    s2 = s1 / rng.uniform(1.0, max_cond)
    T = rot(rng.uniform(0, TWO_PI)) @ np.diag([s1, s2]) @ rot(rng.uniform(0, TWO_PI))
    if rng.random() < 0.5:
        T = T @ np.diag([1.0, -1.0])
    return T


def test_linear_invariance(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(20240607)
    bodies = {"disk": Ellipsoid.ball(2), "smooth2d": SmoothBody2D.from_fourier(1.0, [0.1, 0.05, 0.04], [0.0, -0.03])}
    f = power(2)
    failures, worst, count = 0, 0.0, 0
    for _ in range(20):
        T = _random_gl2(rng)
        assert np.linalg.cond(T) <= 10.0
        S = T / math.sqrt(abs(np.linalg.det(T)))
        for K in bodies.values():
            for mode, M in (("normalized", T), ("tilde", S)):
                rep = check_gl_invariance(K, f, M, tol=1e-6, mode=mode)
                failures += not rep.passed
                worst = max(worst, *(r.slack / (1.0 + abs(r.lhs)) for r in rep.rows))
                count += 1
    elapsed = time.perf_counter() - start
    detail = f"{count} reports (20 GL(2) + 20 det-1 maps per body), worst relative gap {worst:.1e}"
    _verdict(capsys, 6, "linear invariance", failures == 0, detail, elapsed, 120.0)


def test_valuation(capsys):
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    failures, worst, count = 0, 0.0, 0
    for M in (Ellipsoid.ball(2), Ellipsoid.from_axes([2, 1])):
        for _ in range(10):
            t = rng.uniform(0, TWO_PI)
            e = np.array([math.cos(t), math.sin(t)])
            t_plus = rng.uniform(0.1, 0.9) * float(M.support(e))
            t_minus = -rng.uniform(0.1, 0.9) * float(M.support(-e))
            for f in (power(2), power(3)):
                rep = check_valuation(M, e, t_minus, t_plus, f, tol=1e-4)
                failures += not rep.passed
                worst = max(worst, *(r.slack for r in rep.rows))
                count += 1
    elapsed = time.perf_counter() - start
    detail = f"{count} slab decompositions, worst relative defect {worst:.1e}"
    _verdict(capsys, 7, "valuation property", failures == 0, detail, elapsed, 120.0)


KMAX = 5
_WEIGHTS = np.array([k * k - 1.0 for k in range(2, KMAX + 1)])


@st.composite
def fourier_coefficients(draw):
    """Coefficients with ``sum (k^2 - 1)(|c_k| + |s_k|) < 1`` and a bounded translation."""
    raw = np.array(draw(st.lists(st.floats(-1, 1), min_size=2 * KMAX, max_size=2 * KMAX)))
    shift, rest = raw[:2] * 0.3, raw[2:].reshape(-1, 2)
    budget = float(np.sum(_WEIGHTS * np.abs(rest).sum(axis=1)))
    level = draw(st.floats(0.05, 0.95))
    if budget > 0:
        rest = rest * (level / budget)
    cos = [shift[0], *rest[:, 0]]
    sin = [shift[1], *rest[:, 1]]
    return [float(c) for c in cos], [float(s) for s in sin]


def test_lower_bound_property(capsys):
    start = time.perf_counter()
    stats = {"n": 0, "min_gap": math.inf, "strict": 0, "zero": 0}
    failures = []

    @settings(max_examples=50, derandomize=True, deadline=None, database=None,
              suppress_health_check=[HealthCheck.too_slow])
    @example(([0.0] * KMAX, [0.0] * KMAX))
    @given(fourier_coefficients())
    def run(coeffs):
        cos, sin = coeffs
        K = SmoothBody2D.from_fourier(1.0, cos, sin)
        D = f_divergence(power(2), K, "pq").value
        stats["n"] += 1
        stats["min_gap"] = min(stats["min_gap"], D - 1.0)
        size = max(map(abs, cos + sin))
        if D < 1.0 - 1e-9:
            failures.append((coeffs, D))
        if size == 0.0:
            stats["zero"] += 1
            if abs(D - 1.0) > 1e-12:
                failures.append((coeffs, D))
        elif size >= 1e-3:
            stats["strict"] += 1
            if not D > 1.0 + 1e-9:
                failures.append((coeffs, D))

    run()
    elapsed = time.perf_counter() - start
    detail = (f"{stats['n']} bodies ({stats['zero']} unperturbed, {stats['strict']} strictly above 1), "
              f"min D-1 = {stats['min_gap']:.2e}")
    _verdict(capsys, 8, "lower bound D >= f(1)", not failures and stats["n"] >= 50,
             detail + (f", failing {failures[:3]}" if failures else ""), elapsed, 120.0)


def test_polygon_disk_discontinuity(capsys):
    start = time.perf_counter()
    f = power(2)
    values = {k: f_divergence(f, Polytope.regular_polygon(k), "pq").value for k in (8, 64, 512)}
    disk = f_divergence(f, Ellipsoid.ball(2), "pq").value
    elapsed = time.perf_counter() - start
    ok = all(v == 0.0 for v in values.values()) and disk == 1.0
    detail = ", ".join(f"{k}-gon {v:g}" for k, v in values.items()) + f", disk {disk:g}"
    _verdict(capsys, 9, "polygons do not approach the disk", ok, detail, elapsed, 5.0)


def test_mixed_reduction(capsys):
    start = time.perf_counter()
    worst, parts = 0.0, []
    for label, K in [("disk", Ellipsoid.ball(2)), ("ellipse", Ellipsoid.from_axes([2, 1]))]:
        for f in (power(2), power(3), kl()):
            for d in ("pq", "qp"):
                mixed = mixed_divergence([K, K], [f, f], d)
                single = f_divergence(f, K, d, force_quadrature=True).value
                worst = max(worst, _rel(mixed, single))
    elapsed = time.perf_counter() - start
    detail = f"12 cases on disk and ellipse, worst relative gap {worst:.1e}"
    _verdict(capsys, 10, "mixed divergence of identical inputs", worst <= 1e-8, detail, elapsed, 5.0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
