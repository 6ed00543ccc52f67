"""Planar surface bodies and the volume-deficit limit.

For a weight ``g > 0`` on ``dK`` the surface body ``K_{g,s}`` is the
intersection of all halfplanes whose complement cuts off a boundary cap of
``g``-mass at most ``s``.  On a grid of ``m`` directions the cutting offsets
are found by bracketed root finding and ``K_{g,s}`` is approximated by the polygon cut
out by those lines.  As ``s -> 0``,

    c_2 (|K| - |K_{g,s}|) / s**2  ->  int kappa / g**2 dmu,   c_2 = 8,

and for the weight ``g_f`` built from ``f`` the right-hand side is
``D_f(P_K, Q_K)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import linprog
from scipy.optimize.elementwise import find_root
from scipy.spatial import HalfspaceIntersection

from .body import TWO_PI, BoundaryPoint, ball_volume, unit
from .generator import Generator, adjoint
from .measure import densities
from .quadrature import _gauss_legendre, extrapolate_limit, fsum

__all__ = [
    "WeightedBody",
    "SurfaceBodyPolygon",
    "LimitEstimate",
    "surface_constant",
    "surface_body",
    "volume_deficit",
    "limit_estimate",
    "weight_for_divergence",
    "divergence_via_limit",
    "curvature_weight_integral",
]

_ANGLE_TOL = {"xatol": 1e-15, "xrtol": 0.0}
_MASS_TOL = {"xatol": 1e-15, "xrtol": 0.0, "fatol": 1e-13}
MASS_CELLS = 4096
MASS_ORDER = 8


def surface_constant(n: int) -> float:
    """``c_n = 2 |B_2^{n-1}|^{2/(n-1)}``; ``c_2 = 8``."""
    return 2.0 * ball_volume(n - 1) ** (2.0 / (n - 1))


def _check_planar_smooth(K):
    if K.dim != 2 or not hasattr(K, "_angle_point") or K.kind not in ("ellipsoid", "smooth2d"):
        raise TypeError("surface bodies are implemented for planar ellipses and smooth2d bodies")


def _as_weight(g) -> Callable:
    if callable(g):
        return g
    c = float(g)
    if c <= 0:
        raise ValueError("weight must be positive")
    return lambda b: np.full(np.shape(b.support), c)


@dataclass(frozen=True)
class WeightedBody:
    """A planar smooth body with a positive weight on its boundary."""

    K: object
    g: Callable

    def __post_init__(self):
        _check_planar_smooth(self.K)
        object.__setattr__(self, "g", _as_weight(self.g))

    def density(self, theta):
        """``g * f_K`` at normal angle ``theta``: the weight per unit normal angle."""
        x, fK = self.K._angle_point(theta)
        b = BoundaryPoint.build(x, unit(theta), fK)
        return self.g(b) * fK


class _CumulativeMass:
    """Antiderivative of ``g dmu`` in the normal angle, accurate to rounding."""

    def __init__(self, wb: WeightedBody, cells: int = MASS_CELLS, order: int = MASS_ORDER):
        self.wb = wb
        self.h = TWO_PI / cells
        self.cells = cells
        self.xi, self.w = _gauss_legendre(order)
        left = self.h * np.arange(cells)
        nodes = left[:, None] + 0.5 * self.h * (self.xi[None, :] + 1.0)
        vals = wb.density(nodes.ravel()).reshape(nodes.shape)
        per_cell = 0.5 * self.h * (vals @ self.w)
        if np.any(per_cell <= 0):
            raise ValueError("weight must be strictly positive on the boundary")
        self.cum = np.concatenate([[0.0], np.cumsum(per_cell)])
        self.total = fsum(per_cell)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        wraps = np.floor(theta / TWO_PI)
        local = theta - wraps * TWO_PI
        k = np.minimum(np.floor(local / self.h).astype(int), self.cells - 1)
        a = k * self.h
        half = 0.5 * (local - a)
        nodes = a[..., None] + half[..., None] * (self.xi + 1.0)
        part = half * (self.wb.density(nodes.ravel()).reshape(nodes.shape) @ self.w)
        return wraps * self.total + self.cum[k] + part


@dataclass(frozen=True)
class SurfaceBodyPolygon:
    """Grid approximation of ``K_{g,s}``: the polygon ``<x, u_j> <= t_j``."""

    s: float
    angles: np.ndarray
    offsets: np.ndarray
    vertices: np.ndarray
    empty: bool = False

    @property
    def area(self) -> float:
        if self.empty:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * fsum(x * np.roll(y, -1) - np.roll(x, -1) * y)

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all(pts @ unit(self.angles).T <= self.offsets + tol, axis=1)


def _polygon(angles, offsets):
    N = unit(angles)
    N2 = np.roll(N, -1, axis=0)
    t2 = np.roll(offsets, -1)
    det = N[:, 0] * N2[:, 1] - N[:, 1] * N2[:, 0]
    x = (offsets * N2[:, 1] - t2 * N[:, 1]) / det
    y = (N[:, 0] * t2 - N2[:, 0] * offsets) / det
    V = np.column_stack([x, y])
    scale = max(1.0, float(np.max(np.abs(offsets))))
    if np.all(V @ N.T <= offsets + 1e-12 * scale):
        return V
    # some lines are redundant: fall back to a general halfplane intersection
    interior = np.zeros(2)
    if np.any(offsets <= 0):
        # Chebyshev centre: max r with <c, u_j> + r <= t_j
        res = linprog([0.0, 0.0, -1.0], A_ub=np.column_stack([N, np.ones(len(N))]), b_ub=offsets,
                      bounds=[(None, None), (None, None), (0.0, None)], method="highs")
        if not res.success or res.x[2] <= 1e-12 * scale:
            return None
        interior = res.x[:2]
    hsi = HalfspaceIntersection(np.column_stack([N, -offsets]), interior)
    P = hsi.intersections
    c = P.mean(axis=0)
    order = np.argsort(np.arctan2(P[:, 1] - c[1], P[:, 0] - c[0]))
    return P[order]


def _phi(K, theta, psi):
    """Height ``<x(theta), u(psi)>`` of the boundary point with normal angle ``theta``."""
    x, _ = K._angle_point(theta)
    return x[..., 0] * np.cos(psi) + x[..., 1] * np.sin(psi)


def _cap_ends(K, psi, t, top):
    """Normal angles ``(alpha, beta)`` where the chord ``<x, u(psi)> = t`` meets ``dK``.

    The height increases on ``[psi - pi, psi]`` and decreases on
    ``[psi, psi + pi]``; ``top`` is the height at ``psi``.
    """
    alpha = np.array(psi, dtype=float, copy=True)
    beta = alpha.copy()
    for ends, sign, lo, hi in ((alpha, 1.0, psi - np.pi, psi), (beta, -1.0, psi, psi + np.pi)):
        far = lo if sign > 0 else hi
        whole = _phi(K, far, psi) >= t      # chord at or below the far point: whole boundary
        ends[whole] = far[whole]
        inner = (t < top) & ~whole
        if np.any(inner):
            res = find_root(lambda th, p_, t_, sg=sign: sg * (_phi(K, th, p_) - t_),
                            (lo[inner], hi[inner]), args=(psi[inner], t[inner]),
                            tolerances=_ANGLE_TOL)
            ends[inner] = res.x
    return alpha, beta


def _offsets(K, cm: _CumulativeMass, angles: np.ndarray, s: float) -> np.ndarray:
    """Offsets ``t_j`` with cap mass ``s`` beyond ``<x, u_j> = t_j``.

    Nested bracketed root finds: the chord height ``t`` outside, the two cap
    endpoints inside.
    """
    t_hi = _phi(K, angles, angles)            # cap mass 0
    t_lo = _phi(K, angles + np.pi, angles)    # cap mass = total
    if s == 0:
        return t_hi

    def excess(t, psi, top):
        alpha, beta = _cap_ends(K, psi, t, top)
        return cm(beta) - cm(alpha) - s

    res = find_root(excess, (t_lo, t_hi), args=(angles, t_hi), tolerances=_MASS_TOL)
    if not np.all(res.success):
        raise ArithmeticError("cap-mass root find did not converge")
    return res.x


@lru_cache(maxsize=32)
def _grid(m: int) -> np.ndarray:
    return TWO_PI * np.arange(m) / m


def surface_body(K, g, s: float, m: int = 1024, _mass=None) -> SurfaceBodyPolygon:
    """Grid polygon approximating ``K_{g,s}``.

    Parameters
    ----------
    K : planar Ellipsoid or SmoothBody2D
    g : callable or positive float
        Weight on the boundary; a callable receives a batched BoundaryPoint.
    s : float
        Cap mass threshold, ``s >= 0``.
    m : int
        Number of grid directions, at least 256.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    if m < 256:
        raise ValueError("need at least 256 directions")
    wb = WeightedBody(K, g)
    cm = _mass if _mass is not None else _CumulativeMass(wb)
    angles = _grid(m)
    if s >= cm.total:
        return SurfaceBodyPolygon(s, angles, np.full(m, -np.inf), np.empty((0, 2)), empty=True)
    t = _offsets(K, cm, angles, s)
    V = _polygon(angles, t)
    if V is None or len(V) < 3:
        return SurfaceBodyPolygon(s, angles, t, np.empty((0, 2)), empty=True)
    return SurfaceBodyPolygon(s, angles, t, V)


def volume_deficit(K, g, s: float, m: int = 1024, _mass=None) -> float:
    """``|K| - |K_{g,s}|`` on the direction grid.

    ``|K|`` is taken as the area of the grid polygon at ``s = 0`` (the
    circumscribed polygon), so the grid error largely cancels in the
    difference.
    """
    wb = WeightedBody(K, g)
    cm = _mass if _mass is not None else _CumulativeMass(wb)
    full = surface_body(K, wb.g, 0.0, m, _mass=cm)
    cut = surface_body(K, wb.g, s, m, _mass=cm)
    return full.area - cut.area


@dataclass(frozen=True)
class LimitEstimate:
    """Extrapolated ``c_n lim (|K| - |K_{g,s}|) / s^{2/(n-1)}`` with its ladder."""

    value: float
    uncertainty: float
    s: np.ndarray
    deficits: np.ndarray
    converged: bool

    @property
    def scaled(self) -> np.ndarray:
        return surface_constant(2) * self.deficits / self.s**2


def limit_estimate(K, g, s0: float = 0.2, halvings: int = 6, m: int = 1024,
                   exponents=(1.0, 2.0), rel_tol: float = 1e-2) -> LimitEstimate:
    """Estimate ``c_2 lim_{s->0} deficit(s) / s^2`` from ``s_k = s0 2^-k``, ``k = 0..halvings``.

    ``deficit / s^2`` is fitted by ``L + C_1 s + C_2 s^2`` and ``c_2 L``
    returned.  ``converged`` is False when the fit's standard error exceeds
    ``rel_tol`` of the estimate.
    """
    wb = WeightedBody(K, g)
    cm = _CumulativeMass(wb)
    s = s0 * 0.5 ** np.arange(halvings + 1)
    full = surface_body(K, wb.g, 0.0, m, _mass=cm).area
    deficits = np.array([full - surface_body(K, wb.g, si, m, _mass=cm).area for si in s])
    c2 = surface_constant(2)
    L, sigma = extrapolate_limit(s, deficits / s**2, exponents)
    value, unc = c2 * L, c2 * sigma
    return LimitEstimate(value, unc, s, deficits, bool(unc <= rel_tol * abs(value)))


def curvature_weight_integral(K, g, m: int = 4096) -> float:
    """``int kappa^{1/(n-1)} / g^{2/(n-1)} dmu`` for planar ``K``, the value of the deficit limit."""
    g = _as_weight(g)
    rule = K.boundary_rule(m)
    return rule.integrate(rule.points.curvature / g(rule.points) ** 2)


def weight_for_divergence(K, f: Generator, direction: str = "pq") -> Callable:
    """The weight ``g_f`` (``pq``) or ``h_f = g_{f*}`` (``qp``) as a callable on boundary points.

    ``g_f = [n |K°| n^n |K|^n p q / f(p/q)^(n-1)]^(1/2)``.

    Raises
    ------
    ValueError
        If ``f(p/q) <= 0`` somewhere on the boundary.
    """
    _check_planar_smooth(K)
    direction = direction.lower()
    if direction not in ("pq", "qp"):
        raise ValueError("direction must be 'pq' or 'qp'")
    gen = f if direction == "pq" else adjoint(f)
    n = K.dim
    const = n * K.polar_volume * n**n * K.volume**n

    def g(b):
        p, q = densities(K, b)
        fv = gen(p / q)
        if np.any(fv <= 0):
            raise ValueError(f"{gen.label} is not positive at p/q; the weight is undefined")
        return np.sqrt(const * p * q / fv ** (n - 1))

    g(K.boundary_rule(1024).points)
    return g


def divergence_via_limit(K, f: Generator, direction: str = "pq", **kwargs) -> LimitEstimate:
    """``D_f`` recovered as the surface-body limit for the weight ``g_f`` (or ``h_f``)."""
    return limit_estimate(K, weight_for_divergence(K, f, direction), **kwargs)
