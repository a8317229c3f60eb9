"""Command-line interface: ``ballconvex <command> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import __version__
from .affine import (CapSpec, ellipsoid_cap_volume_asymptotic, ellipsoid_cap_volume_exact,
                     ellipsoid_cap_volume_quadrature, relative_affine_surface_area,
                     sphere_reciprocal_quadratic_integral, sphere_reciprocal_quadratic_mc)
from .errors import GeometryError, InvalidInputError, PreconditionError
from .experiments import (EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK, EXIT_PRECONDITION,
                          BatteryEntry, emit_report, emit_text, report_bytes, run_property_suite,
                          verify_limit)
from .floating import FloatParams, cross_variogram, floating_body
from .geometry import Ball
from .hull import r_ball_hull
from .bodyspec import body_from_dict, load_body
from .quadrature import sphere_grid
from .rng import MCConfig

log = logging.getLogger("ballconvex")


def _floats(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="master seed for all random streams")
    g.add_argument("--samples", type=int, default=1_000_000, help="Monte Carlo samples per query")
    g.add_argument("--resolution", type=int, default=None, help="direction / quadrature grid resolution")
    g.add_argument("--out", default=None, help="write the result to this file instead of stdout")
    g.add_argument("--format", choices=("csv", "json"), default=None, help="output format")
    g.add_argument("--substreams", type=int, default=1, help="parallel random substreams (results do not change)")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="ballconvex", description=__doc__, parents=[common])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, help=help_, parents=[common])

    p = add("hull", "R-ball hull of a body as a ball polyhedron")
    p.add_argument("--body", required=True, help="body spec: JSON file or inline JSON")
    p.add_argument("--radius", type=float, required=True)

    p = add("float", "R-ball floating body with its exact-cut certificate")
    p.add_argument("--body", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)

    p = add("asa", "relative affine surface area with a node-count convergence table")
    p.add_argument("--body", required=True)
    p.add_argument("--radius", type=float, default=math.inf, help="omit for the classical value")

    p = add("covariogram", "cross-variogram vol(K cap (x + B))")
    p.add_argument("--body", required=True)
    p.add_argument("--ball", type=_floats, required=True, help="ball as c1,...,cn,r")
    p.add_argument("--at", type=_floats, required=True, help="translation x1,...,xn")

    p = add("sphere-integral", "integral of (sum c_i xi_i^2)^(-m/2) over the sphere")
    p.add_argument("--coeffs", type=_floats, required=True)
    p.add_argument("--mc", type=int, default=None, metavar="N", help="also estimate with N samples")

    p = add("cap", "ellipsoid cap volume: asymptotic vs exact")
    p.add_argument("--semiaxes", type=_floats, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--mc", type=int, default=None, metavar="N",
                   help="Monte Carlo exact volume with N samples (default: deterministic quadrature)")

    p = add("verify-limit", "normalised floating-body deficits and their extrapolated limit")
    p.add_argument("--body", required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--deltas", type=_floats, default=[1e-3, 1e-4, 1e-5, 1e-6])
    p.add_argument("--estimator", choices=("radial", "hitmiss", "polar"), default="radial")
    p.add_argument("--tol", type=float, default=0.02, help="relative tolerance of the limit check")

    p = add("props", "property suite; nonzero exit if any check fails")
    p.add_argument("--battery", default=None,
                   help='JSON list of {"name", "R", "body"}; default: built-in battery')
    return parser


def _dir_resolution(args, n, default2=256, default3=12):
    if args.resolution is not None:
        if args.resolution < 1:
            raise InvalidInputError("--resolution must be positive")
        return args.resolution
    return default2 if n == 2 else default3


def _mc(args) -> MCConfig:
    return MCConfig(samples=args.samples, seed=args.seed, substreams=args.substreams)


def _emit(args, obj, default_fmt="json"):
    fmt = args.format or default_fmt
    if args.out:
        emit_report(obj, args.out, fmt)
    else:
        sys.stdout.write(report_bytes(obj, fmt).decode())


def _table(args, header, rows, extra=None):
    if (args.format or "json") == "csv":
        lines = [",".join(header)] + [",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in r)
                                      for r in rows]
        text = "\n".join(lines) + "\n"
        if args.out:
            emit_text(text, args.out)
        else:
            sys.stdout.write(text)
        return
    doc = dict(extra or {})
    doc["table"] = [dict(zip(header, r)) for r in rows]
    _emit(args, doc)


def cmd_hull(args):
    K = load_body(args.body)
    grid = sphere_grid(K.dim - 1, _dir_resolution(args, K.dim, 256, 16))
    _emit(args, r_ball_hull(K, args.radius, grid).to_dict())


def cmd_float(args):
    K = load_body(args.body)
    params = FloatParams(R=args.radius, delta=args.delta,
                         dir_resolution=_dir_resolution(args, K.dim), mc=_mc(args))
    _emit(args, floating_body(K, params).to_dict())


def cmd_asa(args):
    K = load_body(args.body)
    m = _dir_resolution(args, K.dim, 512, 48)
    rows = []
    for r in (max(m // 4, 2), max(m // 2, 2), m):
        rows.append([r, len(sphere_grid(K.dim - 1, r)),
                     relative_affine_surface_area(K, args.radius, sphere_grid(K.dim - 1, r))])
    _table(args, ["resolution", "nodes", "value"], rows,
           {"value": rows[-1][2], "R": args.radius if math.isfinite(args.radius) else "inf"})


def cmd_covariogram(args):
    K = load_body(args.body)
    if len(args.ball) != K.dim + 1 or len(args.at) != K.dim:
        raise InvalidInputError(f"--ball needs {K.dim + 1} numbers and --at needs {K.dim}")
    ball = Ball(np.asarray(args.ball[:-1]), args.ball[-1])
    est = cross_variogram(K, ball, np.asarray(args.at), _mc(args))
    _table(args, ["estimate", "stderr"], [[float(est.value), float(est.stderr)]])


def cmd_sphere_integral(args):
    closed = sphere_reciprocal_quadratic_integral(args.coeffs)
    out = {"coeffs": args.coeffs, "closed_form": closed}
    if args.mc:
        est = sphere_reciprocal_quadratic_mc(args.coeffs, MCConfig(args.mc, args.seed, args.substreams))
        out.update(mc=float(est.value), stderr=float(est.stderr),
                   relative_difference=abs(float(est.value) - closed) / closed)
    _emit(args, out)


def cmd_cap(args):
    spec = CapSpec(tuple(args.semiaxes), args.R, args.h)
    asym = ellipsoid_cap_volume_asymptotic(spec)
    out = {"semiaxes": list(spec.semiaxes), "R": spec.R, "h": spec.h, "asymptotic": asym}
    if args.mc:
        est = ellipsoid_cap_volume_exact(spec, MCConfig(args.mc, args.seed, args.substreams))
        out.update(exact=float(est.value), stderr=float(est.stderr), method="monte-carlo")
    else:
        out.update(exact=ellipsoid_cap_volume_quadrature(spec), stderr=0.0, method="quadrature")
    out["ratio"] = out["exact"] / asym if asym > 0 else float("nan")
    _emit(args, out)


def cmd_verify_limit(args):
    K = load_body(args.body)
    params = FloatParams(R=args.radius, delta=max(args.deltas),
                         dir_resolution=_dir_resolution(args, K.dim, 64, 8), mc=_mc(args))
    series = verify_limit(K, args.radius, args.deltas, params, body=K.__class__.__name__.lower(),
                          estimator=args.estimator)
    _emit(args, series, "csv")
    log.info("intercept %.9g, predicted %.9g, relative error %.3g",
             series.intercept, series.predicted, series.relative_error())
    if not series.consistent(args.tol):
        sys.stderr.write(f"limit check failed: intercept {series.intercept:.9g} vs predicted "
                         f"{series.predicted:.9g} (relative error {series.relative_error():.3g} > {args.tol})\n")
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_props(args):
    battery = None
    if args.battery is not None:
        try:
            with open(args.battery) as fh:
                entries = json.load(fh)
        except OSError as exc:
            raise InvalidInputError(f"cannot read battery {args.battery}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"battery is not valid JSON: {exc}") from exc
        if not isinstance(entries, list):
            raise InvalidInputError("battery must be a JSON list")
        battery = [BatteryEntry(str(e.get("name", i)), body_from_dict(e["body"]), float(e["R"]))
                   for i, e in enumerate(entries)]
    kwargs = {"samples": min(args.samples, 200_000)}
    if args.resolution:
        kwargs["dir_resolution"] = args.resolution
    report = run_property_suite(args.seed, battery, **kwargs)
    _emit(args, report)
    for c in report.failures():
        sys.stderr.write(f"FAIL {c.name} [{c.body}]: measured {c.measured:.6g} > tolerance {c.tolerance:.6g}\n")
    return report.exit_code


COMMANDS = {
    "hull": cmd_hull, "float": cmd_float, "asa": cmd_asa, "covariogram": cmd_covariogram,
    "sphere-integral": cmd_sphere_integral, "cap": cmd_cap, "verify-limit": cmd_verify_limit,
    "props": cmd_props,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        code = COMMANDS[args.command](args)
    except PreconditionError as exc:
        sys.stderr.write(f"precondition failed: {exc}\n")
        return EXIT_PRECONDITION
    except (GeometryError, ValueError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
