"""f-divergences of convex bodies with respect to their cone measures.

Normalized divergences compare ``P_K`` and ``Q_K``; the non-normalized
("tilde") ones compare ``kappa / <x,N>^n mu_K`` with ``<x,N> mu_K``.  Both
directions are supported, the reverse one through the *-adjoint.

Polytopes and ellipsoids are handled by closed forms before any
quadrature is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .body import ConvexBody, Ellipsoid, Polytope
from .generator import Generator, adjoint, kl, power, times
from .quadrature import DEFAULT_LEVEL, DEFAULT_M, circle_rule, fsum, sphere3_rule

__all__ = [
    "DivergenceResult",
    "f_divergence",
    "f_divergence_reverse_direct",
    "lpsi_asa",
    "lp_asa",
    "kl_divergence",
    "hellinger",
    "renyi",
    "mixed_divergence",
]

DIRECTIONS = ("pq", "qp")
MODES = ("normalized", "tilde")


@dataclass(frozen=True)
class DivergenceResult:
    value: float
    direction: str
    normalization: str
    branch: str
    error_estimate: float = 0.0
    flags: tuple = field(default=())

    def __float__(self) -> float:
        return float(self.value)


def _check(direction: str, normalization: str):
    direction = direction.lower()
    normalization = normalization.lower()
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}")
    if normalization not in MODES:
        raise ValueError(f"normalization must be one of {MODES}")
    return direction, normalization


def _ratio_and_weight(K: ConvexBody, pts, normalization: str):
    """Density ratio ``p/q`` and the density ``q`` (or their tilde versions)."""
    n = K.dim
    s = pts.support
    if normalization == "normalized":
        ratio = K.volume * pts.curvature / (K.polar_volume * s ** (n + 1))
        dens = s / (n * K.volume)
    else:
        ratio = pts.curvature / s ** (n + 1)
        dens = s
    return ratio, dens


def _sum_terms(vals, mass) -> float:
    # 0 * inf = 0: zero-mass nodes never contribute
    mass = np.asarray(mass, dtype=float)
    vals = np.where(mass == 0.0, 0.0, vals)
    return fsum(vals * mass)


def _quadrature_value(f: Generator, K: ConvexBody, normalization: str, resolution) -> float:
    rule = K.boundary_rule(resolution)
    ratio, dens = _ratio_and_weight(K, rule.points, normalization)
    flat = rule.points.curvature == 0.0
    vals = np.empty_like(ratio)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals[~flat] = f(ratio[~flat])
    vals[flat] = f.f_at_zero
    return _sum_terms(vals, dens * rule.weights)


def _half(K, resolution):
    if resolution is None:
        resolution = DEFAULT_LEVEL if K.dim == 3 else DEFAULT_M
    return max(resolution // 2, 8 if K.dim == 2 else 4)


def f_divergence(f: Generator, K: ConvexBody, direction: str = "pq",
                 normalization: str = "normalized", resolution: int | None = None,
                 force_quadrature: bool = False) -> DivergenceResult:
    """``D_f`` of ``K`` with respect to its cone measures.

    Parameters
    ----------
    f : Generator
    K : ConvexBody
    direction : {"pq", "qp"}
        ``pq`` is ``int f(p/q) q dmu``; ``qp`` is computed as the ``pq``
        divergence of the adjoint ``f*``.
    normalization : {"normalized", "tilde"}
    resolution : int, optional
        Quadrature resolution (nodes per turn in 2D, Gauss level in 3D).
    force_quadrature : bool
        Skip the ellipsoid closed form (used to cross-check quadrature).

    Returns
    -------
    DivergenceResult
        The value may be ``inf``; closed-form branches report error 0.
    """
    direction, normalization = _check(direction, normalization)
    g = f if direction == "pq" else adjoint(f)
    n = K.dim
    if isinstance(K, Polytope):
        # kappa = 0 a.e.: p vanishes, so only the endpoint value of g survives
        value = g.f_at_zero if normalization == "normalized" else times(n * K.volume, g.f_at_zero)
        return DivergenceResult(value, direction, normalization, "exact_polytope")
    if isinstance(K, Ellipsoid) and not force_quadrature:
        # p/q == 1; in tilde mode kappa / <x,N>^{n+1} == 1/det M
        if normalization == "normalized":
            value = float(g(1.0))
        else:
            value = float(g(1.0 / K.det)) * n * K.volume
        return DivergenceResult(value, direction, normalization, "exact_ellipsoid")
    branch = "piecewise" if K.kind in ("rounded_polygon", "clipped2d") else "quadrature"
    fine = _quadrature_value(g, K, normalization, resolution)
    coarse = _quadrature_value(g, K, normalization, _half(K, resolution))
    err = abs(fine - coarse) if math.isfinite(fine) and math.isfinite(coarse) else 0.0
    return DivergenceResult(fine, direction, normalization, branch, err)


def f_divergence_reverse_direct(f: Generator, K: ConvexBody, normalization: str = "normalized",
                                resolution: int | None = None) -> float:
    """``D_f(Q, P) = int f(q/p) p dmu`` evaluated from that integrand directly.

    Independent of the adjoint route used by :func:`f_divergence`; on flat
    pieces the integrand tends to ``f*(0) q``.
    """
    _, normalization = _check("qp", normalization)
    rule = K.boundary_rule(resolution)
    ratio, dens = _ratio_and_weight(K, rule.points, normalization)
    flat = rule.points.curvature == 0.0
    vals = np.empty_like(ratio)
    r = ratio[~flat]
    with np.errstate(divide="ignore"):
        vals[~flat] = f(1.0 / r) * r
    vals[flat] = f.fstar_at_zero
    return _sum_terms(vals, dens * rule.weights)


def lpsi_asa(psi: Generator, K: ConvexBody, **kwargs) -> DivergenceResult:
    """L_psi affine surface area: the non-normalized ``pq`` divergence for ``psi``."""
    return f_divergence(psi, K, "pq", "tilde", **kwargs)


def lp_asa(p: float, K: ConvexBody, **kwargs) -> DivergenceResult:
    """L_p affine surface area ``int kappa^{p/(n+p)} <x,N>^{-n(p-1)/(n+p)} dmu``.

    Defined for every ``p != -n``.  For ``p > 0`` the generator
    ``t**(p/(n+p))`` is concave; the result then carries the
    ``"concave-family"`` flag.
    """
    n = K.dim
    if p == -n:
        raise ValueError("p = -n is excluded")
    g = power(p / (n + p), allow_concave=True)
    res = f_divergence(g, K, "pq", "tilde", **kwargs)
    flags = ("concave-family",) if p > 0 else ()
    return DivergenceResult(res.value, res.direction, res.normalization, res.branch,
                            res.error_estimate, flags)


def kl_divergence(K: ConvexBody, direction: str = "pq", **kwargs) -> DivergenceResult:
    """Relative entropy ``D_KL(P_K || Q_K)`` (``pq``) or ``D_KL(Q_K || P_K)`` (``qp``)."""
    return f_divergence(kl(), K, direction, "normalized", **kwargs)


def hellinger(K: ConvexBody, alpha: float, **kwargs) -> float:
    """Hellinger integral ``H_alpha = int p^alpha q^(1-alpha) dmu``."""
    return float(f_divergence(power(alpha, allow_concave=True), K, "pq", "normalized", **kwargs).value)


def renyi(K: ConvexBody, alpha: float, **kwargs) -> float:
    """Renyi divergence ``ln(H_alpha) / (alpha - 1)``; ``alpha = 1`` is relative entropy.

    ``H_alpha = 0`` (mutually singular measures, e.g. polytopes) gives ``inf``.
    """
    if alpha == 1:
        return float(kl_divergence(K, "pq", **kwargs).value)
    H = hellinger(K, alpha, **kwargs)
    if H == 0.0:
        return math.inf
    if math.isinf(H):
        return math.inf if alpha > 1 else -math.inf
    return math.log(H) / (alpha - 1.0)


def mixed_divergence(bodies, generators, direction: str = "pq", resolution: int | None = None) -> float:
    """Mixed f-divergence of ``n`` bodies in ``R^n``.

    ``int_S prod_i [f_i(p_i/q_i) q_i]^{1/n} dsigma`` with the sphere densities
    ``p_i = 1/(n |K_i°| h_i^n)`` and ``q_i = f_{K_i} h_i / (n |K_i|)``
    (swapped roles for ``qp``).  Bodies must have a finite positive
    curvature function everywhere (ellipsoids, smooth planar bodies).
    """
    direction, _ = _check(direction, "normalized")
    bodies = list(bodies)
    generators = list(generators)
    if len(bodies) != len(generators):
        raise ValueError("need one generator per body")
    dims = {K.dim for K in bodies}
    if len(dims) != 1:
        raise ValueError("all bodies must have the same dimension")
    (n,) = dims
    if len(bodies) != n:
        raise ValueError(f"mixed divergence in dimension {n} needs {n} bodies")
    for K in bodies:
        if not (isinstance(K, Ellipsoid) or K.kind == "smooth2d"):
            raise TypeError(f"mixed divergences need smooth bodies, got {K.kind}")
    if n == 2:
        rule = circle_rule(resolution or DEFAULT_M)
    elif n == 3:
        rule = sphere3_rule(resolution or DEFAULT_LEVEL)
    else:
        raise NotImplementedError("mixed divergences are available in dimensions 2 and 3")
    u = rule.nodes
    prod = np.ones(len(u))
    for K, f in zip(bodies, generators):
        h = K.support(u)
        p = 1.0 / (n * K.polar_volume * h**n)
        q = K.curvature_function(u) * h / (n * K.volume)
        factor = f(p / q) * q if direction == "pq" else f(q / p) * p
        if np.any(factor < -1e-14):
            raise ValueError(f"generator {f.label} gives negative factors; the n-th root is undefined")
        prod = prod * np.maximum(factor, 0.0)
    return rule.integrate(prod ** (1.0 / n))
