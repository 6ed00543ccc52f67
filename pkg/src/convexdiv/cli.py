"""Command-line front end.

Bodies are read from JSON files with a ``kind`` discriminator, results are
written as CSV (header row first) to standard output, and diagnostics go to
standard error.  Exit status: 0 success, 1 computation error, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .body import ClippedBody2D, ConvexBody, Ellipsoid, Polytope, RoundedPolygon, SmoothBody2D
from .divergence import f_divergence, kl_divergence, lp_asa, mixed_divergence, renyi
from .generator import Generator, parse_generator
from .surface_body import curvature_weight_integral, divergence_via_limit, limit_estimate
from .verify import check_bounds, check_gl_invariance, check_valuation

__all__ = ["main", "body_from_spec", "load_body", "format_float", "UsageError"]

BODY_KINDS = ("ellipsoid", "ball", "polytope", "smooth2d", "rounded_polygon", "clipped2d")


class UsageError(Exception):
    """Bad input: unreadable file, malformed body spec, unknown generator."""


def format_float(x: float) -> str:
    """Shortest round-trip repr; ``inf``/``-inf``/``nan`` literals."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def _format_error(x: float) -> str:
    return "0" if x == 0 else format_float(x)


def _require(spec: dict, key: str, kind: str):
    if key not in spec:
        raise UsageError(f"{kind} body needs a '{key}' field")
    return spec[key]


def body_from_spec(spec: dict) -> ConvexBody:
    """Build a body from a parsed JSON mapping.

    Raises :class:`UsageError` naming the violated invariant.
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise UsageError("body spec must be an object with a 'kind' field")
    kind = str(spec["kind"]).lower()
    try:
        if kind == "ball":
            return Ellipsoid.ball(int(spec.get("n", 2)), float(spec.get("radius", 1.0)))
        if kind == "ellipsoid":
            if "matrix" in spec:
                return Ellipsoid(spec["matrix"])
            axes = _require(spec, "axes", kind)
            rot = spec.get("rotation")
            if rot is not None and np.ndim(rot) == 0:
                c, s = math.cos(float(rot)), math.sin(float(rot))
                rot = [[c, -s], [s, c]]
            return Ellipsoid.from_axes(axes, rot)
        if kind == "polytope":
            if "regular" in spec:
                return Polytope.regular_polygon(int(spec["regular"]), float(spec.get("radius", 1.0)),
                                                float(spec.get("phase", 0.0)))
            if "vertices" in spec:
                return Polytope(vertices=spec["vertices"])
            return Polytope(halfspaces=_require(spec, "halfspaces", kind))
        if kind == "smooth2d":
            return SmoothBody2D.from_fourier(float(spec.get("a0", 1.0)), spec.get("cos", []),
                                             spec.get("sin", []))
        if kind == "rounded_polygon":
            return RoundedPolygon(_require(spec, "vertices", kind), float(_require(spec, "eps", kind)))
        if kind == "clipped2d":
            return ClippedBody2D(body_from_spec(_require(spec, "base", kind)),
                                 _require(spec, "halfplanes", kind))
    except UsageError:
        raise
    except (ValueError, TypeError, np.linalg.LinAlgError) as exc:
        raise UsageError(f"invalid {kind} body: {exc}") from None
    except Exception as exc:  # qhull errors for degenerate point sets
        raise UsageError(f"invalid {kind} body: {exc}") from None
    raise UsageError(f"unknown body kind {kind!r}; expected one of {', '.join(BODY_KINDS)}")


def load_body(path: str) -> ConvexBody:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read body file {path}: {exc.strerror}") from None
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return body_from_spec(spec)


def _generator(text: str, n: int) -> Generator:
    try:
        return parse_generator(text, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _floats(text: str, count: int | None, what: str) -> list:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{what}: expected {count} numbers, got {len(vals)}")
    return vals


class _Out:
    def __init__(self, stream):
        self.w = csv.writer(stream, lineterminator="\n")

    def row(self, *cells):
        self.w.writerow(cells)


# -- subcommands -------------------------------------------------------------

def _cmd_divergence(a, out):
    K = load_body(a.body)
    f = _generator(a.generator, K.dim)
    r = f_divergence(f, K, a.direction, a.mode, a.quadrature)
    out.row("value", "error", "branch")
    out.row(format_float(r.value), _format_error(r.error_estimate), r.branch)


def _cmd_asa(a, out):
    K = load_body(a.body)
    r = lp_asa(a.p, K, resolution=a.quadrature)
    out.row("value", "error", "branch", "flags")
    out.row(format_float(r.value), _format_error(r.error_estimate), r.branch, ";".join(r.flags))


def _cmd_kl(a, out):
    K = load_body(a.body)
    r = kl_divergence(K, a.direction, resolution=a.quadrature)
    out.row("value", "error", "branch")
    out.row(format_float(r.value), _format_error(r.error_estimate), r.branch)


def _cmd_renyi(a, out):
    K = load_body(a.body)
    out.row("alpha", "value")
    out.row(format_float(a.alpha), format_float(renyi(K, a.alpha, resolution=a.quadrature)))


def _cmd_mixed(a, out):
    bodies = [load_body(p) for p in a.bodies.split(",")]
    n = bodies[0].dim
    gens = [_generator(g, n) for g in a.generators.split(",")]
    value = mixed_divergence(bodies, gens, a.direction, a.quadrature)
    out.row("value")
    out.row(format_float(value))


def _cmd_polar(a, out):
    K = load_body(a.body)
    out.row("volume", "polar_volume")
    out.row(format_float(K.volume), format_float(K.polar_volume))


def _cmd_surface_limit(a, out):
    K = load_body(a.body)
    s0, k = _floats(a.ladder, 2, "--ladder")
    if k != int(k) or k < 2:
        raise UsageError("--ladder: the number of halvings must be an integer >= 2")
    kw = dict(s0=s0, halvings=int(k), m=a.directions)
    if a.generator is not None:
        f = _generator(a.generator, K.dim)
        est = divergence_via_limit(K, f, a.direction, **kw)
        direct = f_divergence(f, K, a.direction, "normalized", a.quadrature).value
    else:
        est = limit_estimate(K, a.weight, **kw)
        direct = curvature_weight_integral(K, a.weight)
    out.row("s", "deficit", "scaled_deficit", "direct", "extrapolated")
    for s, d, sc in zip(est.s, est.deficits, est.scaled):
        out.row(format_float(s), format_float(d), format_float(sc), format_float(direct),
                format_float(est.value))
    if not est.converged:
        print(f"warning: extrapolation did not converge (uncertainty {est.uncertainty:.3g})",
              file=sys.stderr)


def _cmd_check(a, out):
    K = load_body(a.body)
    f = _generator(a.generator, K.dim)
    tol = {} if a.tol is None else {"tol": a.tol}
    if a.which == "invariance":
        if a.matrix is None:
            raise UsageError("check invariance needs --matrix")
        vals = _floats(a.matrix, K.dim * K.dim, "--matrix")
        T = np.array(vals).reshape(K.dim, K.dim)
        if abs(np.linalg.det(T)) < 1e-14:
            raise UsageError("--matrix is singular")
        try:
            report = check_gl_invariance(K, f, T, mode=a.mode, resolution=a.quadrature, **tol)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    elif a.which == "valuation":
        axis = _floats(a.axis, 2, "--axis")
        t_minus, t_plus = _floats(a.cuts, 2, "--cuts")
        if not t_minus < 0 < t_plus:
            raise UsageError("--cuts: need t- < 0 < t+ so the origin is interior to every piece")
        report = check_valuation(K, axis, t_minus, t_plus, f, resolution=a.quadrature, **tol)
    else:
        report = check_bounds(K, f, resolution=a.quadrature, **tol)
    if a.format == "json":
        sys.stdout.write(report.to_json() + "\n")
    else:
        sys.stdout.write(report.to_csv())
    return 0 if report.passed else 1


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quadrature", type=int, default=None, metavar="M",
                        help="quadrature resolution (nodes per turn in 2D, level in 3D)")
    common.add_argument("--tol", type=float, default=None, help="tolerance for checks")
    common.add_argument("--seed", type=int, default=None,
                        help="accepted for compatibility; the pipeline is deterministic")

    p = argparse.ArgumentParser(prog="convexdiv", parents=[common],
                                description="f-divergences of convex bodies and their checks")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, func):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=func)
        return sp

    sp = add("divergence", "D_f in one direction and normalization", _cmd_divergence)
    sp.add_argument("--body", required=True)
    sp.add_argument("--generator", required=True, help="NAME[:params], e.g. power:2, kl, linear:-1:2")
    sp.add_argument("--direction", choices=("pq", "qp"), default="pq")
    sp.add_argument("--mode", choices=("normalized", "tilde"), default="normalized")

    sp = add("asa", "L_p affine surface area", _cmd_asa)
    sp.add_argument("--body", required=True)
    sp.add_argument("--p", type=float, required=True)

    sp = add("kl", "relative entropy", _cmd_kl)
    sp.add_argument("--body", required=True)
    sp.add_argument("--direction", choices=("pq", "qp"), default="pq")

    sp = add("renyi", "Renyi divergence of order alpha", _cmd_renyi)
    sp.add_argument("--body", required=True)
    sp.add_argument("--alpha", type=float, required=True)

    sp = add("mixed", "mixed f-divergence of n bodies", _cmd_mixed)
    sp.add_argument("--bodies", required=True, help="comma-separated body files")
    sp.add_argument("--generators", required=True, help="comma-separated generators")
    sp.add_argument("--direction", choices=("pq", "qp"), default="pq")

    sp = add("polar", "volume and polar volume", _cmd_polar)
    sp.add_argument("--body", required=True)

    sp = add("surface-limit", "surface-body deficit ladder and its extrapolated limit",
             _cmd_surface_limit)
    sp.add_argument("--body", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--generator", help="use the weight g_f (or h_f for --direction qp)")
    g.add_argument("--weight", type=float, help="constant weight g")
    sp.add_argument("--direction", choices=("pq", "qp"), default="pq")
    sp.add_argument("--ladder", default="0.2,6", help="s0,halvings (default 0.2,6)")
    sp.add_argument("--directions", type=int, default=1024, help="direction grid size m")

    sp = add("check", "invariance, valuation or bound report", _cmd_check)
    sp.add_argument("which", choices=("invariance", "valuation", "bounds"))
    sp.add_argument("--body", required=True)
    sp.add_argument("--generator", required=True)
    sp.add_argument("--matrix", help="row-major entries of T (invariance)")
    sp.add_argument("--mode", choices=("normalized", "tilde"), default="normalized")
    sp.add_argument("--axis", default="1,0", help="cut normal (valuation)")
    sp.add_argument("--cuts", default="-0.3,0.3", help="t-,t+ (valuation)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return int(exc.code or 0)
    if args.quadrature is not None and args.quadrature < 8:
        print("error: --quadrature must be at least 8", file=sys.stderr)
        return 2
    out = _Out(sys.stdout)
    try:
        status = args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, ArithmeticError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return int(status or 0)


if __name__ == "__main__":
    sys.exit(main())
