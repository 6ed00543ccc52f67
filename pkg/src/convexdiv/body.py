"""Convex bodies with the boundary data used by cone-measure divergences.

Every body contains the origin in its interior and exposes its support
function ``h(u)``, curvature function ``f_K(u)`` (reciprocal Gauss curvature
at the boundary point with outer normal ``u``), volume, polar volume and
linear images, plus a :class:`~convexdiv.quadrature.BoundaryRule` for
integration against surface measure on the boundary.

Planar bodies other than polytopes are described by an ordered list of
boundary pieces, sorted by outer normal angle: smooth arcs parametrised by
the normal angle and flat segments carrying a single normal.  Gaps between
consecutive pieces are corners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import ConvexHull, HalfspaceIntersection
from scipy.special import gammaln

from .quadrature import (
    DEFAULT_LEVEL,
    DEFAULT_M,
    BoundaryRule,
    circle_rule,
    fsum,
    interval_rule,
    sphere3_rule,
)

__all__ = [
    "BoundaryPoint",
    "ConvexBody",
    "Ellipsoid",
    "Polytope",
    "SmoothBody2D",
    "RoundedPolygon",
    "ClippedBody2D",
    "ball_volume",
    "unit",
]

TWO_PI = 2.0 * np.pi
UNIT_TOL = 1e-9


def ball_volume(n: int) -> float:
    """Volume of the Euclidean unit ball in ``R^n``."""
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0))


def unit(theta):
    """Unit vector(s) at angle ``theta``."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _check_unit(u, n: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != n:
        raise ValueError(f"direction must have {n} components, got shape {u.shape}")
    norms = np.linalg.norm(u, axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise ValueError("direction is not a unit vector")
    return u


@dataclass(frozen=True)
class BoundaryPoint:
    """Boundary data at one point, or a batch of points (leading axis).

    ``curvature`` is the Gauss curvature and ``curvature_function`` its
    reciprocal; flat points have curvature 0 and curvature function ``inf``.
    """

    x: np.ndarray
    u: np.ndarray
    support: np.ndarray
    curvature: np.ndarray
    curvature_function: np.ndarray

    @classmethod
    def build(cls, x, u, fK) -> "BoundaryPoint":
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        fK = np.asarray(fK, dtype=float)
        with np.errstate(divide="ignore"):
            kappa = np.where(np.isinf(fK), 0.0, 1.0 / fK)
        return cls(x, u, np.sum(x * u, axis=-1), kappa, fK)

    def __len__(self) -> int:
        return 1 if self.x.ndim == 1 else self.x.shape[0]

    @staticmethod
    def concat(parts: Sequence["BoundaryPoint"]) -> "BoundaryPoint":
        parts = [p for p in parts if p.x.size]
        return BoundaryPoint(*(np.concatenate([np.atleast_1d(getattr(p, f)) if f not in ("x", "u")
                                               else np.atleast_2d(getattr(p, f)) for p in parts])
                               for f in ("x", "u", "support", "curvature", "curvature_function")))


class ConvexBody:
    """Base class; subclasses set ``kind`` and ``dim``."""

    kind: str = "body"
    dim: int

    def support(self, u):
        raise NotImplementedError

    def curvature_function(self, u):
        raise NotImplementedError

    def boundary_point(self, u) -> BoundaryPoint:
        raise NotImplementedError

    def linear_image(self, T) -> "ConvexBody":
        raise NotImplementedError

    def boundary_rule(self, resolution: int | None = None, normal_range=None) -> BoundaryRule:
        raise NotImplementedError

    @cached_property
    def volume(self) -> float:
        rule = self.boundary_rule()
        return rule.integrate(rule.points.support) / self.dim

    @cached_property
    def polar_volume(self) -> float:
        raise NotImplementedError

    @property
    def is_c2_plus(self) -> bool:
        """True for bodies with C^2 boundary and positive curvature everywhere."""
        return False

    def _check_origin_interior(self, m: int = 720) -> None:
        if self.dim == 2:
            u = circle_rule(m).nodes
        else:
            u = sphere3_rule(24).nodes if self.dim == 3 else np.vstack([np.eye(self.dim), -np.eye(self.dim)])
        if not np.all(self.support(u) > 0):
            raise ValueError("origin is not in the interior of the body")

    @staticmethod
    def _check_matrix(T, n: int) -> np.ndarray:
        T = np.asarray(T, dtype=float)
        if T.shape != (n, n):
            raise ValueError(f"linear map must be {n}x{n}")
        det = np.linalg.det(T)
        if abs(det) <= 1e-14 * max(1.0, np.linalg.norm(T)) ** n:
            raise ValueError("linear map is singular")
        return T


# --------------------------------------------------------------------------
# planar pieces


@dataclass(frozen=True)
class _Arc:
    theta0: float
    theta1: float
    point: Callable  # theta -> (x (N,2), fK (N,))
    periodic: bool = False


@dataclass(frozen=True)
class _Flat:
    theta: float
    start: np.ndarray
    end: np.ndarray

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))


def _piece_end(piece):
    if isinstance(piece, _Arc):
        return piece.point(np.array([piece.theta1]))[0][0]
    return piece.end


def _partition(pieces):
    """Normal-angle intervals ``(a, b, payload)``; payload is an arc point map or a corner point."""
    out = []
    for i, piece in enumerate(pieces):
        nxt = pieces[(i + 1) % len(pieces)]
        if isinstance(piece, _Arc):
            out.append((piece.theta0, piece.theta1, piece.point))
            a = piece.theta1
        else:
            a = piece.theta
        b = nxt.theta0 if isinstance(nxt, _Arc) else nxt.theta
        if i == len(pieces) - 1:
            b += TWO_PI
        if b > a:
            out.append((a, b, _piece_end(piece)))
    return out


def _planar_support(pieces, partition, theta):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    start = partition[0][0]
    t = start + np.mod(theta - start, TWO_PI)
    lefts = np.array([p[0] for p in partition])
    idx = np.clip(np.searchsorted(lefts, t, side="right") - 1, 0, len(partition) - 1)
    out = np.empty_like(t)
    u = unit(t)
    for k, (_, _, payload) in enumerate(partition):
        mask = idx == k
        if not np.any(mask):
            continue
        if callable(payload):
            x, _ = payload(t[mask])
            out[mask] = np.sum(x * u[mask], axis=-1)
        else:
            out[mask] = u[mask] @ payload
    # flat pieces: exact supporting value at their normal
    for piece in pieces:
        if isinstance(piece, _Flat):
            hit = np.abs(np.mod(t - piece.theta + np.pi, TWO_PI) - np.pi) < 1e-15
            if np.any(hit):
                out[hit] = u[hit] @ piece.start
    return out


def _range_segments(pieces_start: float, normal_range):
    """Split a normal-angle range into pieces within ``[start, start + 2 pi]``."""
    if normal_range is None:
        return [(pieces_start, pieces_start + TWO_PI)]
    a, b = map(float, normal_range)
    if b - a >= TWO_PI - 1e-15:
        return [(pieces_start, pieces_start + TWO_PI)]
    a0 = pieces_start + np.mod(a - pieces_start, TWO_PI)
    b0 = a0 + (b - a)
    segs = [(a0, min(b0, pieces_start + TWO_PI))]
    if b0 > pieces_start + TWO_PI:
        segs.append((pieces_start, b0 - TWO_PI))
    return segs


def _planar_rule(pieces, m: int, normal_range=None) -> BoundaryRule:
    if len(pieces) == 1 and isinstance(pieces[0], _Arc) and pieces[0].periodic and normal_range is None:
        rule = circle_rule(m)
        theta = 2.0 * np.pi * np.arange(m) / m
        x, fK = pieces[0].point(theta)
        return BoundaryRule(BoundaryPoint.build(x, rule.nodes, fK), fK * rule.weights)
    start = pieces[0].theta0 if isinstance(pieces[0], _Arc) else pieces[0].theta
    segs = _range_segments(start, normal_range)
    parts, weights = [], []
    for lo, hi in segs:
        for piece in pieces:
            if isinstance(piece, _Arc):
                a, b = max(piece.theta0, lo), min(piece.theta1, hi)
                th, w = interval_rule(a, b, m)
                if th.size == 0:
                    continue
                x, fK = piece.point(th)
                parts.append(BoundaryPoint.build(x, unit(th), fK))
                weights.append(fK * w)
            elif lo <= piece.theta < hi or (normal_range is None and piece.theta == hi):
                mid = 0.5 * (piece.start + piece.end)
                parts.append(BoundaryPoint.build(mid[None, :], unit(np.array([piece.theta])),
                                                 np.array([np.inf])))
                weights.append(np.array([piece.length]))
    return BoundaryRule(BoundaryPoint.concat(parts), np.concatenate(weights))


def _planar_polar_volume(pieces, partition, m: int = DEFAULT_M) -> float:
    if len(pieces) == 1 and isinstance(pieces[0], _Arc) and pieces[0].periodic:
        theta = 2.0 * np.pi * np.arange(m) / m
        x, _ = pieces[0].point(theta)
        h = np.sum(x * unit(theta), axis=-1)
        return 0.5 * fsum(h**-2.0) * TWO_PI / m
    total = 0.0
    for a, b, payload in partition:
        th, w = interval_rule(a, b, m)
        if callable(payload):
            x, _ = payload(th)
            h = np.sum(x * unit(th), axis=-1)
        else:
            h = unit(th) @ payload
        total += fsum(w / h**2)
    return 0.5 * total


def _pieces_boundary_point(pieces, theta: float) -> BoundaryPoint:
    start = pieces[0].theta0 if isinstance(pieces[0], _Arc) else pieces[0].theta
    t = start + np.mod(theta - start, TWO_PI)
    for piece in pieces:
        if isinstance(piece, _Flat):
            if abs(np.mod(t - piece.theta + np.pi, TWO_PI) - np.pi) < 1e-12:
                mid = 0.5 * (piece.start + piece.end)
                return BoundaryPoint.build(mid, unit(piece.theta), np.inf)
    for piece in pieces:
        if isinstance(piece, _Arc):
            for tt in (t, t + TWO_PI, t - TWO_PI):
                if piece.theta0 <= tt <= piece.theta1:
                    x, fK = piece.point(np.array([tt]))
                    return BoundaryPoint.build(x[0], unit(theta), fK[0])
    raise ValueError("direction is a corner normal; the boundary point has zero curvature function")


class _Planar(ConvexBody):
    """Mixin for planar bodies described by boundary pieces."""

    dim = 2

    def _pieces(self):
        raise NotImplementedError

    @cached_property
    def pieces(self):
        return self._pieces()

    @cached_property
    def _normal_partition(self):
        return _partition(self.pieces)

    def boundary_rule(self, resolution=None, normal_range=None) -> BoundaryRule:
        return _planar_rule(self.pieces, resolution or DEFAULT_M, normal_range)

    def support_angle(self, theta):
        return _planar_support(self.pieces, self._normal_partition, theta)

    @cached_property
    def polar_volume(self) -> float:
        return _planar_polar_volume(self.pieces, self._normal_partition)


# --------------------------------------------------------------------------
# ellipsoids


class Ellipsoid(ConvexBody):
    """The body ``{x : x^T M^{-1} x <= 1}`` for symmetric positive-definite ``M``."""

    kind = "ellipsoid"

    def __init__(self, M):
        M = np.array(M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 2:
            raise ValueError("shape matrix must be square with n >= 2")
        if not np.allclose(M, M.T, rtol=1e-12, atol=1e-14):
            raise ValueError("shape matrix is not symmetric")
        M = 0.5 * (M + M.T)
        if np.min(np.linalg.eigvalsh(M)) <= 0:
            raise ValueError("shape matrix is not positive definite")
        self.M = M
        self.dim = M.shape[0]
        self.det = float(np.linalg.det(M))

    @classmethod
    def ball(cls, n: int = 2, radius: float = 1.0) -> "Ellipsoid":
        return cls(radius**2 * np.eye(n))

    @classmethod
    def from_axes(cls, axes, rotation=None) -> "Ellipsoid":
        D = np.diag(np.asarray(axes, dtype=float) ** 2)
        if rotation is not None:
            R = np.asarray(rotation, dtype=float)
            D = R @ D @ R.T
        return cls(D)

    def __repr__(self):
        return f"Ellipsoid(M={self.M.tolist()})"

    @property
    def is_c2_plus(self) -> bool:
        return True

    def support(self, u):
        u = _check_unit(u, self.dim)
        return np.sqrt(np.einsum("...i,ij,...j->...", u, self.M, u))

    def curvature_function(self, u):
        return self.det / self.support(u) ** (self.dim + 1)

    def boundary_point(self, u) -> BoundaryPoint:
        u = _check_unit(u, self.dim)
        h = np.sqrt(np.einsum("...i,ij,...j->...", u, self.M, u))
        x = (u @ self.M) / h[..., None]
        return BoundaryPoint.build(x, u, self.det / h ** (self.dim + 1))

    def _angle_point(self, theta):
        u = unit(theta)
        h = np.sqrt(np.einsum("...i,ij,...j->...", u, self.M, u))
        return (u @ self.M) / h[..., None], self.det / h**3

    @cached_property
    def volume(self) -> float:
        return ball_volume(self.dim) * math.sqrt(self.det)

    @cached_property
    def polar_volume(self) -> float:
        return ball_volume(self.dim) / math.sqrt(self.det)

    def linear_image(self, T) -> "Ellipsoid":
        T = self._check_matrix(T, self.dim)
        return Ellipsoid(T @ self.M @ T.T)

    @cached_property
    def pieces(self):
        if self.dim != 2:
            raise AttributeError("pieces exist only for planar ellipsoids")
        return [_Arc(0.0, TWO_PI, self._angle_point, periodic=True)]

    def boundary_rule(self, resolution=None, normal_range=None) -> BoundaryRule:
        if self.dim == 2:
            return _planar_rule(self.pieces, resolution or DEFAULT_M, normal_range)
        if self.dim == 3:
            if normal_range is not None:
                raise ValueError("normal ranges are planar; use a cap region in 3D")
            rule = sphere3_rule(resolution or DEFAULT_LEVEL)
            bp = self.boundary_point(rule.nodes)
            return BoundaryRule(bp, bp.curvature_function * rule.weights)
        raise NotImplementedError("quadrature for ellipsoids is available in dimensions 2 and 3")


# --------------------------------------------------------------------------
# smooth planar bodies


class SmoothBody2D(_Planar):
    """Planar C^2_+ body given by its support function ``h(theta)``.

    Derivatives ``dh`` and ``d2h`` may be supplied in closed form; otherwise
    central differences with step ``1e-5`` are used.
    """

    kind = "smooth2d"
    FD_STEP = 1e-5

    def __init__(self, h, dh=None, d2h=None, label: str = "smooth2d", check: bool = True):
        self._h = h
        d = self.FD_STEP
        self._dh = dh if dh is not None else (lambda t: (h(t + d) - h(t - d)) / (2 * d))
        self._d2h = d2h if d2h is not None else (lambda t: (h(t + d) - 2 * h(t) + h(t - d)) / d**2)
        self.label = label
        self.fourier = None
        if check:
            theta = 2.0 * np.pi * np.arange(4096) / 4096
            if not np.all(self._h(theta) > 0):
                raise ValueError("support function must be positive (origin interior)")
            if not np.all(self.radius_of_curvature(theta) > 0):
                raise ValueError("h + h'' must be positive (strict convexity)")

    @classmethod
    def from_fourier(cls, a0: float = 1.0, cos=(), sin=(), check: bool = True) -> "SmoothBody2D":
        """``h = a0 + sum_k cos[k-1] cos(k t) + sin[k-1] sin(k t)``."""
        c = np.asarray(cos, dtype=float)
        s = np.asarray(sin, dtype=float)
        kc = np.arange(1, c.size + 1)
        ks = np.arange(1, s.size + 1)

        def h(t):
            t = np.asarray(t, dtype=float)[..., None]
            return a0 + np.sum(c * np.cos(kc * t), -1) + np.sum(s * np.sin(ks * t), -1)

        def dh(t):
            t = np.asarray(t, dtype=float)[..., None]
            return np.sum(-kc * c * np.sin(kc * t), -1) + np.sum(ks * s * np.cos(ks * t), -1)

        def d2h(t):
            t = np.asarray(t, dtype=float)[..., None]
            return np.sum(-kc**2 * c * np.cos(kc * t), -1) - np.sum(ks**2 * s * np.sin(ks * t), -1)

        body = cls(h, dh, d2h, label="fourier", check=check)
        body.fourier = (float(a0), c.tolist(), s.tolist())
        return body

    def __repr__(self):
        if self.fourier is not None:
            return f"SmoothBody2D.from_fourier{self.fourier}"
        return f"SmoothBody2D({self.label})"

    @property
    def is_c2_plus(self) -> bool:
        return True

    def h(self, theta):
        return self._h(np.asarray(theta, dtype=float))

    def dh(self, theta):
        return self._dh(np.asarray(theta, dtype=float))

    def d2h(self, theta):
        return self._d2h(np.asarray(theta, dtype=float))

    def radius_of_curvature(self, theta):
        return self.h(theta) + self.d2h(theta)

    def _angle_point(self, theta):
        theta = np.asarray(theta, dtype=float)
        e = unit(theta)
        ep = np.stack([-e[..., 1], e[..., 0]], axis=-1)
        x = self.h(theta)[..., None] * e + self.dh(theta)[..., None] * ep
        return x, self.radius_of_curvature(theta)

    def _pieces(self):
        return [_Arc(0.0, TWO_PI, self._angle_point, periodic=True)]

    def support(self, u):
        u = _check_unit(u, 2)
        return self.h(np.arctan2(u[..., 1], u[..., 0]))

    def curvature_function(self, u):
        u = _check_unit(u, 2)
        return self.radius_of_curvature(np.arctan2(u[..., 1], u[..., 0]))

    def boundary_point(self, u) -> BoundaryPoint:
        u = _check_unit(u, 2)
        x, fK = self._angle_point(np.arctan2(u[..., 1], u[..., 0]))
        return BoundaryPoint.build(x, u, fK)

    def linear_image(self, T) -> "SmoothBody2D":
        """Image under ``T``, via ``h_{TK}(u) = H(T^t u)`` for the 1-homogeneous extension ``H``.

        Derivatives are propagated exactly: with ``y = T^t e(theta)``,
        ``g' = x_K(phi) . T^t e'(theta)`` and
        ``g'' = (h + h'')(phi) (e'(phi) . T^t e'(theta))^2 / |y| - g``.
        """
        T = self._check_matrix(T, 2)
        A = T.T
        base = self

        def parts(theta):
            theta = np.asarray(theta, dtype=float)
            e = unit(theta)
            ep = np.stack([-e[..., 1], e[..., 0]], axis=-1)
            y = e @ A.T
            yp = ep @ A.T
            r = np.linalg.norm(y, axis=-1)
            phi = np.arctan2(y[..., 1], y[..., 0])
            return phi, r, yp

        def h(theta):
            phi, r, _ = parts(theta)
            return r * base.h(phi)

        def dh(theta):
            phi, r, yp = parts(theta)
            x, _ = base._angle_point(phi)
            return np.sum(x * yp, axis=-1)

        def d2h(theta):
            phi, r, yp = parts(theta)
            eperp = unit(phi + 0.5 * np.pi)
            rho = base.radius_of_curvature(phi)
            return rho * np.sum(eperp * yp, axis=-1) ** 2 / r - r * base.h(phi)

        return SmoothBody2D(h, dh, d2h, label=f"T({self.label})")


# --------------------------------------------------------------------------
# polytopes


class Polytope(ConvexBody):
    """Polytope with both H- and V-representation.

    Halfspaces are rows ``(a, b)`` meaning ``<x, a> <= b`` with unit ``a``
    and ``b > 0``.  Either representation may be given; the other is built
    with qhull.
    """

    kind = "polytope"

    def __init__(self, vertices=None, halfspaces=None):
        if vertices is None and halfspaces is None:
            raise ValueError("give vertices or halfspaces")
        if vertices is None:
            H = np.asarray(halfspaces, dtype=float)
            A, b = H[:, :-1], H[:, -1]
            norms = np.linalg.norm(A, axis=1)
            A, b = A / norms[:, None], b / norms
            if np.any(b <= 0):
                raise ValueError("every halfspace offset must be positive (origin interior)")
            hsi = HalfspaceIntersection(np.column_stack([A, -b]), np.zeros(A.shape[1]))
            vertices = hsi.intersections
        V = np.asarray(vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] < 2:
            raise ValueError("vertices must be an (m, n) array with n >= 2")
        hull = ConvexHull(V)
        self.dim = V.shape[1]
        self.vertices = V[hull.vertices]
        eq = hull.equations
        A, b = eq[:, :-1], -eq[:, -1]
        if np.any(b <= 1e-12):
            raise ValueError("origin is not in the interior of the polytope")
        keys = np.round(np.column_stack([A, b]), 9)
        _, first = np.unique(keys, axis=0, return_index=True)
        first = np.sort(first)
        self.normals = A[first]
        self.offsets = b[first]
        self._volume = float(hull.volume)
        scale = np.max(np.abs(self.vertices))
        slack = self.vertices @ self.normals.T - self.offsets
        if np.any(slack > 1e-9 * max(1.0, scale)):
            raise ValueError("vertex violates a halfspace")
        self._facet_vertices = [np.flatnonzero(np.abs(col) <= 1e-9 * max(1.0, scale)) for col in slack.T]
        if self.dim == 2:
            order = np.argsort(np.mod(np.arctan2(self.normals[:, 1], self.normals[:, 0]), TWO_PI))
            self.normals, self.offsets = self.normals[order], self.offsets[order]
            self._facet_vertices = [self._facet_vertices[i] for i in order]

    @classmethod
    def regular_polygon(cls, k: int, radius: float = 1.0, phase: float = 0.0) -> "Polytope":
        t = phase + TWO_PI * np.arange(k) / k
        return cls(vertices=radius * unit(t))

    @classmethod
    def cube(cls, n: int = 2, half_side: float = 1.0) -> "Polytope":
        A = np.vstack([np.eye(n), -np.eye(n)])
        return cls(halfspaces=np.column_stack([A, np.full(2 * n, half_side)]))

    def __repr__(self):
        return f"Polytope(dim={self.dim}, facets={len(self.offsets)}, vertices={len(self.vertices)})"

    @property
    def halfspaces(self) -> np.ndarray:
        return np.column_stack([self.normals, self.offsets])

    @cached_property
    def facet_areas(self) -> np.ndarray:
        areas = []
        for a, idx in zip(self.normals, self._facet_vertices):
            P = self.vertices[idx]
            if self.dim == 2:
                d = P[:, None, :] - P[None, :, :]
                areas.append(float(np.max(np.linalg.norm(d, axis=-1))))
            else:
                # orthonormal basis of the facet hyperplane
                _, _, Vt = np.linalg.svd(a[None, :])
                basis = Vt[1:]
                Q = (P - P[0]) @ basis.T
                areas.append(float(ConvexHull(Q).volume) if self.dim > 2 else 0.0)
        return np.array(areas)

    @cached_property
    def facet_centroids(self) -> np.ndarray:
        return np.array([self.vertices[idx].mean(axis=0) for idx in self._facet_vertices])

    def support(self, u):
        u = _check_unit(u, self.dim)
        return np.max(u @ self.vertices.T, axis=-1)

    def curvature_function(self, u):
        """``inf`` at facet normals (flat), 0 at all other directions (vertices)."""
        u = _check_unit(u, self.dim)
        dots = u @ self.normals.T
        return np.where(np.any(dots >= 1.0 - 1e-12, axis=-1), np.inf, 0.0)

    def boundary_point(self, u) -> BoundaryPoint:
        raise TypeError("the Gauss map of a polytope is not invertible")

    @cached_property
    def volume(self) -> float:
        return self._volume

    @cached_property
    def polar(self) -> "Polytope":
        return Polytope(vertices=self.normals / self.offsets[:, None])

    @cached_property
    def polar_volume(self) -> float:
        return self.polar.volume

    def linear_image(self, T) -> "Polytope":
        T = self._check_matrix(T, self.dim)
        return Polytope(vertices=self.vertices @ T.T)

    def facet_normal_angles(self) -> np.ndarray:
        if self.dim != 2:
            raise ValueError("normal angles are planar")
        return np.mod(np.arctan2(self.normals[:, 1], self.normals[:, 0]), TWO_PI)

    def boundary_rule(self, resolution=None, normal_range=None) -> BoundaryRule:
        """One node per facet: exact for integrands constant on facets."""
        mask = np.ones(len(self.offsets), dtype=bool)
        if normal_range is not None:
            a, b = normal_range
            ang = self.facet_normal_angles()
            mask = np.mod(ang - a, TWO_PI) < (b - a)
        bp = BoundaryPoint.build(self.facet_centroids[mask], self.normals[mask],
                                 np.full(int(mask.sum()), np.inf))
        return BoundaryRule(bp, self.facet_areas[mask])


# --------------------------------------------------------------------------
# rounded polygons and clipped bodies


class RoundedPolygon(_Planar):
    """Minkowski sum of a convex polygon and a disk of radius ``eps``."""

    kind = "rounded_polygon"

    def __init__(self, vertices, eps: float):
        if eps <= 0:
            raise ValueError("eps must be positive")
        V = np.asarray(vertices, dtype=float)
        hull = ConvexHull(V)
        V = V[hull.vertices]  # counter-clockwise in 2D
        if np.any(hull.equations[:, -1] >= 0):
            raise ValueError("origin is not in the interior of the base polygon")
        self.base = V
        self.eps = float(eps)
        E = np.roll(V, -1, axis=0) - V
        self._edge_len = np.linalg.norm(E, axis=1)
        self._edge_normals = np.column_stack([E[:, 1], -E[:, 0]]) / self._edge_len[:, None]

    def __repr__(self):
        return f"RoundedPolygon(vertices={self.base.tolist()}, eps={self.eps})"

    def _pieces(self):
        V, eps, N = self.base, self.eps, self._edge_normals
        k = len(V)
        ang = np.arctan2(N[:, 1], N[:, 0])
        ang = ang[0] + np.concatenate([[0.0], np.cumsum(np.mod(np.diff(ang), TWO_PI))])
        pieces = []
        for i in range(k):
            j = (i + 1) % k
            pieces.append(_Flat(float(ang[i]), V[i] + eps * N[i], V[j] + eps * N[i]))
            hi = ang[i + 1] if i + 1 < k else ang[0] + TWO_PI

            def arc_point(theta, v=V[j].copy()):
                theta = np.asarray(theta, dtype=float)
                return v + eps * unit(theta), np.full(theta.shape, eps)

            pieces.append(_Arc(float(ang[i]), float(hi), arc_point))
        return pieces

    @cached_property
    def volume(self) -> float:
        area = ConvexHull(self.base).volume
        return float(area + self.eps * self._edge_len.sum() + math.pi * self.eps**2)

    def support(self, u):
        u = _check_unit(u, 2)
        return np.max(u @ self.base.T, axis=-1) + self.eps

    def curvature_function(self, u):
        u = _check_unit(u, 2)
        flat = np.any(u @ self._edge_normals.T >= 1.0 - 1e-12, axis=-1)
        return np.where(flat, np.inf, self.eps)

    def boundary_point(self, u) -> BoundaryPoint:
        u = _check_unit(u, 2)
        return _pieces_boundary_point(self.pieces, float(np.arctan2(u[1], u[0])))

    def linear_image(self, T):
        raise TypeError("linear images of rounded polygons are not rounded polygons")


class ClippedBody2D(_Planar):
    """Planar smooth body intersected with halfplanes ``<x, a> <= b``.

    The boundary consists of arcs of the base body and flat chords on the
    cutting lines, so curvature is taken from the base on arcs and is 0 on
    chords.
    """

    kind = "clipped2d"

    def __init__(self, base, halfplanes):
        if not hasattr(base, "_angle_point") or base.dim != 2:
            raise TypeError("base must be a planar ellipse or SmoothBody2D")
        self.base = base
        H = np.atleast_2d(np.asarray(halfplanes, dtype=float))
        norms = np.linalg.norm(H[:, :2], axis=1)
        self.halfplanes = H / norms[:, None]
        if np.any(self.halfplanes[:, 2] <= 0):
            raise ValueError("origin is not in the interior of the clipped body")

    def __repr__(self):
        return f"ClippedBody2D({self.base!r}, {self.halfplanes.tolist()})"

    def _phi(self, a, theta):
        x, _ = self.base._angle_point(np.atleast_1d(theta))
        return float(x[0] @ a)

    def _pieces(self):
        base = self.base
        cuts = []
        for a1, a2, b in self.halfplanes:
            a = np.array([a1, a2])
            ta = math.atan2(a2, a1)
            if self._phi(a, ta) <= b:
                continue  # inactive
            if self._phi(a, ta + math.pi) >= b:
                raise ValueError("halfplane removes the whole body")
            alpha = brentq(lambda t: self._phi(a, t) - b, ta - math.pi, ta, xtol=1e-15, rtol=1e-15)
            beta = brentq(lambda t: self._phi(a, t) - b, ta, ta + math.pi, xtol=1e-15, rtol=1e-15)
            cuts.append((a, b, ta, alpha, beta))
        if not cuts:
            return list(base.pieces)

        theta = TWO_PI * np.arange(4096) / 4096
        x, _ = base._angle_point(theta)
        slack = np.min(np.stack([b - x @ a for a, b, *_ in cuts]), axis=0)
        ref = float(theta[np.argmax(slack)])
        if slack.max() <= 0:
            raise ValueError("clipped body has no arc of the base boundary")

        removed = []
        for a, b, ta, alpha, beta in cuts:
            k = math.floor((alpha - ref) / TWO_PI)
            removed.append((alpha - k * TWO_PI, beta - k * TWO_PI))
        removed.sort()
        merged = []
        for lo, hi in removed:
            if merged and lo <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        pieces = []
        cursor = ref
        for lo, hi in merged:
            if lo > cursor:
                pieces.append(_Arc(cursor, lo, base._angle_point))
            cursor = max(cursor, hi)
        if ref + TWO_PI > cursor:
            pieces.append(_Arc(cursor, ref + TWO_PI, base._angle_point))

        for i, (a, b, ta, alpha, beta) in enumerate(cuts):
            P = base._angle_point(np.array([alpha]))[0][0]
            Q = base._angle_point(np.array([beta]))[0][0]
            d = Q - P
            lo, hi = 0.0, 1.0
            for j, (a2, b2, *_) in enumerate(cuts):
                if j == i:
                    continue
                num, den = b2 - a2 @ P, a2 @ d
                if abs(den) < 1e-300:
                    if num < 0:
                        lo, hi = 1.0, 0.0
                    continue
                lam = num / den
                if den > 0:
                    hi = min(hi, lam)
                else:
                    lo = max(lo, lam)
            if hi - lo <= 1e-15:
                continue
            t = ref + np.mod(ta - ref, TWO_PI)
            pieces.append(_Flat(float(t), P + lo * d, P + hi * d))

        pieces.sort(key=lambda p: p.theta0 if isinstance(p, _Arc) else p.theta)
        return pieces

    @property
    def flats(self):
        return [p for p in self.pieces if isinstance(p, _Flat)]

    def support(self, u):
        u = _check_unit(u, 2)
        return self.support_angle(np.arctan2(u[..., 1], u[..., 0])).reshape(u.shape[:-1])

    def curvature_function(self, u):
        u = _check_unit(u, 2)
        th = np.atleast_1d(np.arctan2(u[..., 1], u[..., 0]))
        out = np.zeros_like(th)
        start = self._normal_partition[0][0]
        t = start + np.mod(th - start, TWO_PI)
        for piece in self.pieces:
            if isinstance(piece, _Arc):
                m = (t >= piece.theta0) & (t <= piece.theta1)
                if np.any(m):
                    out[m] = piece.point(t[m])[1]
            else:
                m = np.abs(np.mod(t - piece.theta + np.pi, TWO_PI) - np.pi) < 1e-12
                out[m] = np.inf
        return out.reshape(u.shape[:-1])

    def boundary_point(self, u) -> BoundaryPoint:
        u = _check_unit(u, 2)
        return _pieces_boundary_point(self.pieces, float(np.arctan2(u[1], u[0])))

    def linear_image(self, T) -> "ClippedBody2D":
        T = self._check_matrix(T, 2)
        Tinv_t = np.linalg.inv(T).T
        A = self.halfplanes[:, :2] @ Tinv_t.T
        return ClippedBody2D(self.base.linear_image(T), np.column_stack([A, self.halfplanes[:, 2]]))
