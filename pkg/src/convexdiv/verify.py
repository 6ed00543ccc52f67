"""Executable checks: linear invariance, valuation additivity, lower and upper bounds.

Each check returns a :class:`CheckReport` whose rows carry both sides of an
(in)equality, the slack and a pass flag, so reports can be serialised
as-is.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .body import ClippedBody2D, ConvexBody
from .divergence import f_divergence
from .generator import Generator, adjoint, times
from .measure import mass_over_predicate

__all__ = [
    "CheckRow",
    "CheckReport",
    "check_gl_invariance",
    "check_valuation",
    "check_bounds",
    "slab_bodies",
]


@dataclass(frozen=True)
class CheckRow:
    name: str
    lhs: float
    rhs: float
    relation: str  # "==", ">=" or "<="
    slack: float
    passed: bool


@dataclass
class CheckReport:
    check: str
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def row(self, name: str) -> CheckRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_records(self) -> list:
        return [{"check": self.check, **asdict(r)} for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "name", "lhs", "relation", "rhs", "slack", "passed"])
        for r in self.rows:
            w.writerow([self.check, r.name, _fmt(r.lhs), r.relation, _fmt(r.rhs), _fmt(r.slack),
                        "pass" if r.passed else "fail"])
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            return str(v) if isinstance(v, float) and not math.isfinite(v) else v

        recs = [{k: clean(v) for k, v in rec.items()} for rec in self.to_records()]
        return json.dumps({"check": self.check, "passed": self.passed, "rows": recs}, indent=2)


def _fmt(v: float) -> str:
    return repr(float(v))


def _equal_row(name, a, b, tol) -> CheckRow:
    if math.isinf(a) or math.isinf(b):
        ok = a == b
        return CheckRow(name, a, b, "==", 0.0 if ok else math.inf, ok)
    diff = abs(a - b)
    return CheckRow(name, a, b, "==", diff, diff <= tol * (1.0 + abs(a)))


def _ineq_row(name, lhs, rhs, relation, tol=1e-9) -> CheckRow:
    if relation == ">=":
        slack = lhs - rhs if not (math.isinf(lhs) and math.isinf(rhs)) else 0.0
    else:
        slack = rhs - lhs if not (math.isinf(lhs) and math.isinf(rhs)) else 0.0
    return CheckRow(name, lhs, rhs, relation, slack, bool(slack >= -tol))


def check_gl_invariance(K: ConvexBody, f: Generator, T, tol: float = 1e-6,
                        mode: str = "normalized", resolution: int | None = None,
                        force_quadrature: bool = False) -> CheckReport:
    """Compare ``D_f(K)`` with ``D_f(T K)`` in both directions.

    Normalized divergences are GL(n) invariant; the non-normalized ones only
    under ``|det T| = 1``, which is required for ``mode="tilde"``.
    """
    T = np.asarray(T, dtype=float)
    if mode == "tilde" and abs(abs(np.linalg.det(T)) - 1.0) > 1e-10:
        raise ValueError("non-normalized invariance is checked only for |det T| = 1")
    TK = K.linear_image(T)
    report = CheckReport(f"invariance[{mode}]")
    for d in ("pq", "qp"):
        a = f_divergence(f, K, d, mode, resolution, force_quadrature).value
        b = f_divergence(f, TK, d, mode, resolution, force_quadrature).value
        report.rows.append(_equal_row(d, a, b, tol))
    return report


def slab_bodies(M: ConvexBody, axis, t_minus: float, t_plus: float):
    """``(K, L, K cap L)`` with ``K = M cap {<x,e> <= t+}`` and ``L = M cap {<x,e> >= t-}``.

    ``K cup L = M`` by construction.
    """
    e = np.asarray(axis, dtype=float)
    e = e / np.linalg.norm(e)
    if not (t_minus < 0.0 < t_plus):
        raise ValueError("the origin must lie strictly between the two cuts")
    upper = [e[0], e[1], t_plus]
    lower = [-e[0], -e[1], -t_minus]
    K = ClippedBody2D(M, [upper])
    L = ClippedBody2D(M, [lower])
    KL = ClippedBody2D(M, [upper, lower])
    return K, L, KL


def check_valuation(M: ConvexBody, axis, t_minus: float, t_plus: float, f: Generator,
                    tol: float = 1e-4, resolution: int | None = None) -> CheckReport:
    """Additivity of non-normalized divergences over a slab decomposition of ``M``.

    Checks ``D(K cup L) + D(K cap L) = D(K) + D(L)`` in both directions with
    relative defect at most ``tol``.
    """
    K, L, KL = slab_bodies(M, axis, t_minus, t_plus)
    report = CheckReport("valuation[tilde]")
    for d in ("pq", "qp"):
        vals = [f_divergence(f, B, d, "tilde", resolution).value for B in (M, KL, K, L)]
        lhs, rhs = vals[0] + vals[1], vals[2] + vals[3]
        if math.isinf(lhs) or math.isinf(rhs):
            report.rows.append(CheckRow(d, lhs, rhs, "==", 0.0 if lhs == rhs else math.inf, lhs == rhs))
            continue
        defect = abs(lhs - rhs) / max(1.0, abs(rhs))
        report.rows.append(CheckRow(d, lhs, rhs, "==", defect, defect <= tol))
    return report


def check_bounds(K: ConvexBody, f: Generator, resolution: int | None = None,
                 tol: float = 1e-9) -> CheckReport:
    """Lower and upper bounds for ``D_f(P_K, Q_K)`` and ``D_f(Q_K, P_K)``.

    Rows:

    * ``jensen_pq`` / ``jensen_qp``: the Jensen bound through the masses of
      ``{p > 0}``;
    * ``f1_pq`` / ``f1_qp``: ``D >= f(1)``, when ``K`` is C^2_+ or ``f``
      (respectively ``f*``) is decreasing;
    * ``upper_pq`` / ``upper_qp``: ``D <= f(0) + f*(0) + f(1) [Q(0<p<=q) +
      P(0<q<=p)]``, when ``f(0)``, ``f*(0)`` and ``f(1)`` are finite and
      nonnegative;
    * ``decreasing_pq``: ``D_f(P,Q) <= f(0)`` for decreasing ``f``, and
      ``decreasing_qp``: ``D_f(Q,P) <= f*(0)`` for decreasing ``f*``.
    """
    fs = adjoint(f)
    d_pq = f_divergence(f, K, "pq", "normalized", resolution).value
    d_qp = f_divergence(f, K, "qp", "normalized", resolution).value
    report = CheckReport("bounds")

    p_pos = mass_over_predicate(K, "P", lambda p, q: p > 0, resolution)
    q_pos = mass_over_predicate(K, "Q", lambda p, q: p > 0, resolution)
    q_zero = mass_over_predicate(K, "Q", lambda p, q: p == 0, resolution)
    if q_pos > 0:
        r = p_pos / q_pos
        lower_pq = float(f(r)) * q_pos + times(q_zero, f.f_at_zero)
        lower_qp = float(fs(r)) * q_pos + times(q_zero, fs.f_at_zero)
    else:
        lower_pq, lower_qp = f.f_at_zero, fs.f_at_zero
    report.rows.append(_ineq_row("jensen_pq", d_pq, lower_pq, ">=", tol))
    report.rows.append(_ineq_row("jensen_qp", d_qp, lower_qp, ">=", tol))

    f1 = float(f(1.0))
    # the reverse direction is the forward one for f*, so it needs f* decreasing
    if K.is_c2_plus or f.is_decreasing:
        report.rows.append(_ineq_row("f1_pq", d_pq, f1, ">=", tol))
    if K.is_c2_plus or fs.is_decreasing:
        report.rows.append(_ineq_row("f1_qp", d_qp, f1, ">=", tol))

    f0, fs0 = f.f_at_zero, f.fstar_at_zero
    if math.isfinite(f0) and math.isfinite(fs0) and min(f0, fs0, f1) >= 0:
        bracket = (mass_over_predicate(K, "Q", lambda p, q: (p > 0) & (p <= q), resolution)
                   + mass_over_predicate(K, "P", lambda p, q: (q > 0) & (q <= p), resolution))
        upper = f0 + fs0 + f1 * bracket
        report.rows.append(_ineq_row("upper_pq", d_pq, upper, "<=", tol))
        report.rows.append(_ineq_row("upper_qp", d_qp, upper, "<=", tol))
    if f.is_decreasing:
        report.rows.append(_ineq_row("decreasing_pq", d_pq, f0, "<=", tol))
    if fs.is_decreasing:
        report.rows.append(_ineq_row("decreasing_qp", d_qp, fs0, "<=", tol))
    return report
