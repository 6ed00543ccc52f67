"""Cone-measure densities on the boundary and their masses.

``p_K = kappa / (<x,N>^n n |K°|)`` and ``q_K = <x,N> / (n |K|)`` are densities
with respect to surface measure on ``dK``.  ``Q_K`` is the cone measure of
``K``; ``P_K`` is a probability measure when ``K`` is C^2_+ and vanishes on
polytopes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .body import BoundaryPoint, ConvexBody, Polytope
from .quadrature import cap_rule, fsum, DEFAULT_LEVEL

__all__ = [
    "density_p",
    "density_q",
    "densities",
    "sphere_densities",
    "WholeBoundary",
    "NormalArc",
    "Cap",
    "Facet",
    "cone_measure",
    "total_mass",
    "mass_over_predicate",
]


def density_p(K: ConvexBody, b: BoundaryPoint):
    n = K.dim
    return b.curvature / (b.support**n * n * K.polar_volume)


def density_q(K: ConvexBody, b: BoundaryPoint):
    return b.support / (K.dim * K.volume)


def densities(K: ConvexBody, b: BoundaryPoint):
    """Both densities at once, ``(p, q)``."""
    return density_p(K, b), density_q(K, b)


def sphere_densities(K: ConvexBody, u):
    """Densities of the pushforwards of ``P_K`` and ``Q_K`` to the sphere, w.r.t. ``sigma``.

    ``p(u) = 1 / (n |K°| h(u)^n)`` and ``q(u) = f_K(u) h(u) / (n |K|)``.
    """
    n = K.dim
    h = K.support(u)
    return 1.0 / (n * K.polar_volume * h**n), K.curvature_function(u) * h / (n * K.volume)


@dataclass(frozen=True)
class WholeBoundary:
    pass


@dataclass(frozen=True)
class NormalArc:
    """Boundary points whose outer normal angle lies in ``[theta0, theta1)`` (planar)."""

    theta0: float
    theta1: float


@dataclass(frozen=True)
class Cap:
    """Boundary points whose outer normal lies within ``angle`` of ``axis``."""

    axis: tuple
    angle: float


@dataclass(frozen=True)
class Facet:
    index: int


def cone_measure(K: ConvexBody, region=WholeBoundary(), resolution: int | None = None) -> float:
    """``Q_K(A)``, the normalized volume of the cone from the origin over ``A``."""
    n = K.dim
    if isinstance(region, Facet):
        if not isinstance(K, Polytope):
            raise TypeError("facet regions need a polytope")
        i = region.index
        return float(K.offsets[i] * K.facet_areas[i] / (n * K.volume))
    if isinstance(region, WholeBoundary):
        rule = K.boundary_rule(resolution)
    elif isinstance(region, NormalArc):
        if n != 2:
            raise TypeError("normal-angle arcs are planar regions")
        rule = K.boundary_rule(resolution, normal_range=(region.theta0, region.theta1))
    elif isinstance(region, Cap):
        axis = np.asarray(region.axis, dtype=float)
        axis = axis / np.linalg.norm(axis)
        if n == 2:
            t = float(np.arctan2(axis[1], axis[0]))
            rule = K.boundary_rule(resolution, normal_range=(t - region.angle, t + region.angle))
        elif n == 3 and K.kind == "ellipsoid":
            srule = cap_rule(axis, region.angle, resolution or DEFAULT_LEVEL)
            b = K.boundary_point(srule.nodes)
            return fsum(b.support * b.curvature_function * srule.weights) / (n * K.volume)
        elif isinstance(K, Polytope):
            mask = K.normals @ axis >= np.cos(region.angle)
            return float(fsum(K.offsets[mask] * K.facet_areas[mask]) / (n * K.volume))
        else:
            raise TypeError(f"cap regions are not supported for {K.kind} in dimension {n}")
    else:
        raise TypeError(f"unsupported region {region!r}")
    return rule.integrate(density_q(K, rule.points))


def total_mass(K: ConvexBody, which: str = "P", resolution: int | None = None) -> float:
    """``P_K(dK)`` or ``Q_K(dK)``."""
    return mass_over_predicate(K, which, lambda p, q: np.ones(np.shape(p), dtype=bool), resolution)


def mass_over_predicate(K: ConvexBody, which: str, predicate, resolution: int | None = None) -> float:
    """Mass under ``P_K`` or ``Q_K`` of the set where ``predicate(p, q)`` holds.

    On smooth bodies the indicator is integrated by quadrature; on pieces
    with constant densities (facets, flat segments) the result is exact.
    """
    which = which.upper()
    if which not in ("P", "Q"):
        raise ValueError("which must be 'P' or 'Q'")
    rule = K.boundary_rule(resolution)
    p, q = densities(K, rule.points)
    mask = np.asarray(predicate(p, q), dtype=bool)
    dens = p if which == "P" else q
    return rule.integrate(np.where(mask, dens, 0.0))
