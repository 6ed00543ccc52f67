"""Deterministic quadrature on spheres, arcs and convex boundaries.

Every rule here is fixed (no sampling), and reductions go through
``math.fsum`` so results do not depend on summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DEFAULT_M",
    "DEFAULT_LEVEL",
    "SphereRule",
    "BoundaryRule",
    "circle_rule",
    "sphere3_rule",
    "interval_rule",
    "cap_rule",
    "fsum",
    "integrate_boundary",
    "extrapolate_limit",
]

DEFAULT_M = 4096
DEFAULT_LEVEL = 96
GL_PANEL = 16


def fsum(values) -> float:
    """Correctly rounded sum; ``inf`` propagates."""
    arr = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        return float(np.sum(arr))
    return math.fsum(arr.tolist())


@dataclass(frozen=True)
class SphereRule:
    """Nodes and positive weights on ``S^{n-1}``."""

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    order: str

    def integrate(self, values) -> float:
        return fsum(np.asarray(values) * self.weights)


@dataclass(frozen=True)
class BoundaryRule:
    """Quadrature for the surface measure on a convex boundary.

    ``points`` is a batched :class:`~convexdiv.body.BoundaryPoint`; ``weights``
    are surface-measure weights, so ``sum(phi(points) * weights)``
    approximates the boundary integral of ``phi``.  Flat pieces appear as a
    single node carrying their whole area, with zero curvature.
    """

    points: object
    weights: np.ndarray

    def integrate(self, values) -> float:
        return fsum(np.asarray(values, dtype=float) * self.weights)


def circle_rule(m: int) -> SphereRule:
    """Equispaced trapezoidal rule on the unit circle."""
    if m < 8:
        raise ValueError("circle_rule needs m >= 8")
    theta = 2.0 * np.pi * np.arange(m) / m
    nodes = np.column_stack([np.cos(theta), np.sin(theta)])
    weights = np.full(m, 2.0 * np.pi / m)
    return SphereRule(2, nodes, weights, f"trapezoid:{m}")


@lru_cache(maxsize=64)
def _gauss_legendre(k: int):
    x, w = np.polynomial.legendre.leggauss(k)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def sphere3_rule(level: int) -> SphereRule:
    """Gauss-Legendre in ``cos(polar)`` times trapezoid in azimuth on ``S^2``.

    ``level`` Gauss nodes and ``2*level`` azimuths; exact for spherical
    polynomials of degree below ``2*level``.
    """
    if level < 2:
        raise ValueError("sphere3_rule needs level >= 2")
    z, wz = _gauss_legendre(level)
    naz = 2 * level
    phi = 2.0 * np.pi * np.arange(naz) / naz
    Z, P = np.meshgrid(z, phi, indexing="ij")
    r = np.sqrt(1.0 - Z**2)
    nodes = np.column_stack([(r * np.cos(P)).ravel(), (r * np.sin(P)).ravel(), Z.ravel()])
    weights = np.repeat(wz, naz) * (2.0 * np.pi / naz)
    return SphereRule(3, nodes, weights, f"gl-trapezoid:{level}")


def cap_rule(axis, angle: float, level: int) -> SphereRule:
    """Product rule on the spherical cap of half-angle ``angle`` about ``axis`` in ``S^2``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    x, w = _gauss_legendre(level)
    c = math.cos(angle)
    z = 0.5 * (1.0 - c) * x + 0.5 * (1.0 + c)
    wz = 0.5 * (1.0 - c) * w
    naz = 2 * level
    phi = 2.0 * np.pi * np.arange(naz) / naz
    Z, P = np.meshgrid(z, phi, indexing="ij")
    r = np.sqrt(1.0 - Z**2)
    local = np.column_stack([(r * np.cos(P)).ravel(), (r * np.sin(P)).ravel(), Z.ravel()])
    # orthonormal frame with axis as third column
    helper = np.eye(3)[np.argmin(np.abs(axis))]
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    frame = np.column_stack([e1, e2, axis])
    weights = np.repeat(wz, naz) * (2.0 * np.pi / naz)
    return SphereRule(3, local @ frame.T, weights, f"cap:{level}")


def interval_rule(a: float, b: float, m: int, panel: int = GL_PANEL):
    """Composite Gauss-Legendre nodes and weights on ``[a, b]``.

    The panel count scales so that a full turn of ``2*pi`` receives about
    ``m`` nodes; at least one panel is always used.
    """
    if b <= a:
        return np.empty(0), np.empty(0)
    npan = max(1, math.ceil((b - a) / (2.0 * np.pi) * m / panel))
    x, w = _gauss_legendre(panel)
    edges = np.linspace(a, b, npan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate_boundary(K, phi, resolution: int | None = None):
    """Integrate ``phi`` over ``dK`` against surface measure.

    ``phi`` receives a batched boundary point and returns an array.  The
    error estimate is the difference from the same rule at half resolution.

    Returns
    -------
    value, error : float
    """
    if getattr(K, "kind", None) == "polytope":
        raise TypeError("integrate_boundary does not integrate over polytope boundaries")
    fine = K.boundary_rule(resolution)
    coarse = K.boundary_rule(_half(K, resolution))
    value = fine.integrate(phi(fine.points))
    value_coarse = coarse.integrate(phi(coarse.points))
    return value, abs(value - value_coarse)


def _half(K, resolution):
    if resolution is None:
        resolution = DEFAULT_LEVEL if K.dim == 3 else DEFAULT_M
    return max(resolution // 2, 8 if K.dim == 2 else 4)


def extrapolate_limit(s, values, exponents=(1.0, 2.0)):
    """Least-squares fit of ``value = L + sum_i C_i s**k_i``; returns ``(L, sigma_L)``.

    ``sigma_L`` is the standard error of ``L`` from the fit residual; with
    as many samples as parameters it is 0.
    """
    s = np.asarray(s, dtype=float)
    v = np.asarray(values, dtype=float)
    if s.size < 3 or s.size != v.size:
        raise ValueError("need at least 3 samples")
    if np.any(np.diff(s) >= 0):
        raise ValueError("samples must have strictly decreasing s")
    if s.size < len(exponents) + 1:
        raise ValueError("not enough samples for the model")
    if np.any(s <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("samples need s > 0 and finite values")
    A = np.column_stack([np.ones_like(s)] + [s**k for k in exponents])
    scale = np.linalg.norm(A, axis=0)
    if np.linalg.cond(A / scale) > 1e12:
        raise ValueError("degenerate sample geometry for the fit model")
    coef, *_ = np.linalg.lstsq(A / scale, v, rcond=None)
    coef = coef / scale
    resid = v - A @ coef
    dof = s.size - A.shape[1]
    if dof == 0:
        return float(coef[0]), 0.0
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(A.T @ A)
    return float(coef[0]), float(math.sqrt(max(cov[0, 0], 0.0)))
