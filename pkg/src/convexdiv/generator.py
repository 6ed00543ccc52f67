"""Convex generating functions for f-divergences.

A :class:`Generator` bundles a vectorised convex function ``f`` on
``(0, inf)`` with its two endpoint limits ``f(0) = lim_{t->0} f(t)`` and
``f*(0) = lim_{t->0} t f(1/t)``.  The limits are stored rather than
recomputed; :meth:`Generator.validate` checks them numerically.

Extended reals are plain floats, with ``math.inf`` standing for ``+inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Generator",
    "adjoint",
    "kl",
    "kl_reverse",
    "power",
    "lp_asa_generator",
    "lpsi_example",
    "linear",
    "standard_generator",
    "parse_generator",
    "limit_at_zero",
    "times",
]

_LOG_GRID = np.logspace(-6.0, 6.0, 97)


def times(mass: float, value: float) -> float:
    """Product ``mass * value`` with the convention ``0 * inf = 0``."""
    if mass == 0.0:
        return 0.0
    return mass * value


def limit_at_zero(func: Callable[[np.ndarray], np.ndarray]) -> float:
    """Numerically extrapolate ``lim_{t->0} func(t)``.

    The function is sampled at ``t = 10**-k`` for ``k = 4, 8, ..., 64``.  A
    tail that has settled to 1e-7 relative is returned as the limit; a tail
    that keeps growing is reported as ``+inf`` (a convex function on
    ``(0, inf)`` cannot tend to ``-inf`` at the origin).
    """
    ts = 10.0 ** -np.arange(4, 65, 4, dtype=float)
    with np.errstate(all="ignore"):
        vals = np.asarray(func(ts), dtype=float)
    if np.isposinf(vals[-1]) or (np.isnan(vals[-1]) and vals[-2] > 0):
        return math.inf
    last, prev = vals[-1], vals[-2]
    if abs(last - prev) <= 1e-7 * max(1.0, abs(last)):
        return float(last)
    return math.inf


@dataclass(frozen=True)
class Generator:
    """Convex ``f: (0, inf) -> R`` with its endpoint limits.

    Parameters
    ----------
    func : callable
        Vectorised evaluation of ``f`` on positive arrays.
    f_at_zero : float
        ``lim_{t->0} f(t)``; may be ``math.inf``.
    fstar_at_zero : float
        ``lim_{t->0} t f(1/t)``, i.e. the asymptotic slope of ``f``; may be
        ``math.inf``.
    label : str
        Human readable name, used in reports and CLI output.
    """

    func: Callable[[np.ndarray], np.ndarray]
    f_at_zero: float
    fstar_at_zero: float
    label: str = "f"
    _adjoint_of: Optional["Generator"] = field(default=None, repr=False, compare=False)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            return self.func(t)

    @property
    def is_decreasing(self) -> bool:
        # A convex f is non-increasing iff its asymptotic slope f*(0) <= 0.
        return self.fstar_at_zero <= 0.0

    def at(self, t: float) -> float:
        """Evaluate at a nonnegative scalar, using the stored limit at 0."""
        if t == 0.0:
            return self.f_at_zero
        return float(self(t))

    @classmethod
    def custom(cls, func, f_at_zero: float, fstar_at_zero: float, label: str = "custom",
               check: bool = True) -> "Generator":
        """Build a user generator; ``check`` runs :meth:`validate` first."""
        g = cls(func, float(f_at_zero), float(fstar_at_zero), label)
        if check:
            g.validate()
        return g

    def validate(self) -> None:
        """Sample-check convexity and the stored endpoint limits.

        Raises
        ------
        ValueError
            If midpoint convexity fails on the logarithmic grid, or a stored
            limit disagrees with the extrapolated one.
        """
        if not is_midpoint_convex(self):
            raise ValueError(f"generator {self.label!r} is not convex on [1e-6, 1e6]")
        for name, stored, fn in (
            ("f(0)", self.f_at_zero, self.func),
            ("f*(0)", self.fstar_at_zero, lambda t: t * self.func(1.0 / t)),
        ):
            est = limit_at_zero(fn)
            if math.isinf(stored) or math.isinf(est):
                if stored != est:
                    raise ValueError(f"{name} of {self.label!r}: stored {stored}, extrapolated {est}")
            elif abs(stored - est) > 1e-6 * max(1.0, abs(stored)):
                raise ValueError(f"{name} of {self.label!r}: stored {stored}, extrapolated {est}")


def is_midpoint_convex(f: Generator, grid: np.ndarray = _LOG_GRID) -> bool:
    """Check ``f((s+t)/2) <= (f(s)+f(t))/2`` for all pairs on ``grid``."""
    s, t = np.meshgrid(grid, grid)
    fs, ft = f(s), f(t)
    fm = f(0.5 * (s + t))
    avg = 0.5 * (fs + ft)
    finite = np.isfinite(avg)
    tol = 1e-10 * (0.5 * (np.abs(fs) + np.abs(ft))) + 1e-12
    return bool(np.all(fm[finite] <= avg[finite] + tol[finite]))


def adjoint(f: Generator) -> Generator:
    """The *-adjoint ``f*(t) = t f(1/t)``; an involution."""
    if f._adjoint_of is not None:
        return f._adjoint_of
    func = f.func

    def star(t):
        return t * func(1.0 / t)

    label = f.label[:-1] if f.label.endswith("*") else f.label + "*"
    return Generator(star, f.fstar_at_zero, f.f_at_zero, label, _adjoint_of=f)


def _xlogx(t):
    return t * np.log(t)


def _neglog(t):
    return -np.log(t)


def _reciprocal(t):
    return 1.0 / t


def kl() -> Generator:
    """``f(t) = t ln t``: relative entropy, ``f(0) = 0``, ``f*(0) = inf``."""
    g = Generator(_xlogx, 0.0, math.inf, "kl")
    rev = Generator(_neglog, math.inf, 0.0, "kl_reverse", _adjoint_of=g)
    object.__setattr__(g, "_adjoint_of", rev)
    return g


def kl_reverse() -> Generator:
    """``f(t) = -ln t``, the adjoint of :func:`kl`."""
    return adjoint(kl())


def power(alpha: float, allow_concave: bool = False) -> Generator:
    """``f(t) = t**alpha``.

    Convex for ``alpha <= 0`` or ``alpha >= 1``.  The concave range
    ``0 < alpha < 1`` (Hellinger integrals, L_p affine surface areas with
    ``p > 0``) is accepted only with ``allow_concave=True``.
    """
    alpha = float(alpha)
    if 0.0 < alpha < 1.0 and not allow_concave:
        raise ValueError(f"t**{alpha} is not convex; pass allow_concave=True")
    if alpha > 0:
        f0 = 0.0
    elif alpha == 0:
        f0 = 1.0
    else:
        f0 = math.inf
    beta = 1.0 - alpha
    if beta > 0:
        fs0 = 0.0
    elif beta == 0:
        fs0 = 1.0
    else:
        fs0 = math.inf

    def f(t, a=alpha):
        return np.power(t, a)

    def fstar(t, b=beta):
        return np.power(t, b)

    label = f"power:{alpha:g}"
    g = Generator(f, f0, fs0, label)
    object.__setattr__(g, "_adjoint_of", Generator(fstar, fs0, f0, label + "*", _adjoint_of=g))
    return g


def lp_asa_generator(p: float, n: int, allow_concave: bool = False) -> Generator:
    """``f(t) = t**(p/(n+p))``, whose non-normalized divergence is the L_p affine surface area."""
    if p == -n:
        raise ValueError("p = -n is excluded")
    if p > 0 and not allow_concave:
        raise ValueError("p > 0 gives a concave generator; pass allow_concave=True")
    g = power(p / (n + p), allow_concave=True)
    return Generator(g.func, g.f_at_zero, g.fstar_at_zero, f"lp_asa:{p:g}:{n}")


def lpsi_example() -> Generator:
    """``psi(t) = 1/t``, a member of Conv(0, inf)."""
    return Generator(_reciprocal, math.inf, 0.0, "lpsi")


def linear(a: float, b: float) -> Generator:
    """``f(t) = a t + b``, with ``f(0) = b`` and ``f*(0) = a``."""
    a, b = float(a), float(b)

    def f(t):
        return a * t + b

    return Generator(f, b, a, f"linear:{a:g}:{b:g}")


def standard_generator(kind: str, *params: float, n: int = 2) -> Generator:
    """Look up a library generator by name.

    ``kind`` is one of ``kl``, ``kl_reverse``, ``power`` (``alpha``),
    ``lp_asa`` (``p`` and optionally ``n``), ``lpsi`` and ``linear``
    (``a``, ``b``).
    """
    kind = kind.lower().replace("-", "_")
    if kind == "kl":
        return kl()
    if kind == "kl_reverse":
        return kl_reverse()
    if kind == "power":
        (alpha,) = params
        return power(alpha)
    if kind == "lp_asa":
        if len(params) == 2:
            return lp_asa_generator(params[0], int(params[1]))
        (p,) = params
        return lp_asa_generator(p, n)
    if kind in ("lpsi", "lpsi_example"):
        return lpsi_example()
    if kind == "linear":
        a, b = params
        return linear(a, b)
    raise ValueError(f"unknown generator kind {kind!r}")


def parse_generator(text: str, n: int = 2) -> Generator:
    """Parse ``NAME[:param[:param]]``, e.g. ``power:2`` or ``linear:-1:2``."""
    name, *rest = text.strip().split(":")
    try:
        params = [float(x) for x in rest]
    except ValueError:
        raise ValueError(f"bad generator parameters in {text!r}") from None
    try:
        return standard_generator(name, *params, n=n)
    except TypeError:
        raise ValueError(f"wrong number of parameters for generator {name!r}") from None
