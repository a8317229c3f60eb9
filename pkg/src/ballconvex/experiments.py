"""Limit experiments, the property suite and report writing."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .affine import (isoperimetric_bound, limit_constant, relative_affine_surface_area)
from .errors import InvalidInputError, NotRBallConvexError, ReportIOError
from .floating import (FloatParams, floating_body, radial_volume_difference,
                       scaling_covariance_check, volume_deficit)
from .geometry import make_ball, make_ellipsoid
from .hull import hausdorff_distance, min_curvature, r_ball_hull
from .quadrature import sphere_grid
from .rng import MCConfig
from .valuation import cut_ellipse_configuration, two_disk_configuration, valuation_defect

logger = logging.getLogger(__name__)

CSV_HEADER = ["delta", "deficit", "stderr", "ratio", "predicted", "resolution", "samples", "seed"]

EXIT_OK, EXIT_INVALID, EXIT_PRECONDITION, EXIT_CHECK_FAILED, EXIT_NOTHING_RUN = 0, 2, 3, 4, 5


# --------------------------------------------------------------------------
# limit experiment


@dataclass
class RatioSeries:
    """Normalised deficits ``(vol K - vol K_delta) / delta^{2/(n+1)}`` along a delta ladder."""

    body: str
    R: float
    dim: int
    deltas: list
    deficits: list
    stderrs: list
    ratios: list
    predicted: float
    intercept: float
    intercept_stderr: float
    slope: float
    resolution: int
    samples: int
    seed: int

    def relative_error(self) -> float:
        return abs(self.intercept - self.predicted) / self.predicted

    def consistent(self, tol: float) -> bool:
        return self.relative_error() <= tol

    def rows(self):
        for d, v, s, r in zip(self.deltas, self.deficits, self.stderrs, self.ratios):
            yield [d, v, s, r, self.predicted, self.resolution, self.samples, self.seed]


def _fit(x, y):
    x, y = np.asarray(x), np.asarray(y)
    if len(x) >= 3:
        coef, cov = np.polyfit(x, y, 1, cov="unscaled")
        resid = y - np.polyval(coef, x)
        dof = len(x) - 2
        s2 = float(resid @ resid) / dof if dof > 0 else 0.0
        return float(coef[1]), float(math.sqrt(max(cov[1, 1] * s2, 0.0))), float(coef[0])
    if len(x) == 2:
        slope = (y[1] - y[0]) / (x[1] - x[0])
        return float(y[0] - slope * x[0]), float("nan"), float(slope)
    return float(y[0]), float("nan"), 0.0


def require_kr_plus(K, R: float, margin: float = 1e-3) -> None:
    """Every principal curvature must exceed 1/R by at least ``margin``."""
    kmin, u = min_curvature(K)
    inv = 0.0 if math.isinf(R) else 1.0 / R
    if kmin - inv < margin:
        raise NotRBallConvexError(
            f"minimal curvature {kmin:.6g} at u={np.round(u, 6).tolist()} does not exceed "
            f"1/R={inv:.6g} by the margin {margin}")


def verify_limit(K, R: float, deltas, params: FloatParams, *, body: str = "body",
                 estimator: str = "radial", constant: Callable[[int], float] = limit_constant,
                 asa_resolution: int | None = None) -> RatioSeries:
    """Run the floating-body deficit ladder and extrapolate the normalised ratio.

    Parameters
    ----------
    deltas : sequence of float
        Strictly decreasing.
    estimator : {"radial", "hitmiss", "polar"}
        ``"radial"`` integrates the radial volume difference over the
        construction grid (deterministic, stderr 0). The other two are the
        Monte Carlo estimators of :func:`volume_deficit`.
    constant : callable
        Limit constant ``c_n``; replaceable for fault-injection tests.

    The intercept of a least-squares line through ``(delta^{2/(n+1)}, ratio)``
    is the extrapolated limit, compared against ``c_n as^R(K)``.
    """
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise InvalidInputError("empty delta ladder")
    if any(d <= 0 for d in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise InvalidInputError("deltas must be positive and strictly decreasing")
    if estimator not in ("radial", "hitmiss", "polar"):
        raise InvalidInputError(f"unknown estimator {estimator!r}")
    require_kr_plus(K, R)
    n = K.dim
    asa_grid = sphere_grid(n - 1, asa_resolution or (1024 if n == 2 else 96))
    predicted = constant(n) * relative_affine_surface_area(K, R, asa_grid)
    grid = sphere_grid(n - 1, params.dir_resolution)
    p = 2.0 / (n + 1)
    deficits, errs, ratios = [], [], []
    for d in deltas:
        prm = replace(params, R=R, delta=d)
        fb = floating_body(K, prm, grid)
        if estimator == "radial":
            v, s = radial_volume_difference(K, fb, grid), 0.0
        else:
            v, s = volume_deficit(K, prm, fb, method=estimator)
        r = v / d ** p
        if not (0 < r < 10 * predicted):
            raise InvalidInputError(f"ratio {r} at delta={d} outside (0, 10*predicted)")
        logger.info("delta=%g deficit=%.12g ratio=%.9g", d, v, r)
        deficits.append(float(v))
        errs.append(float(s))
        ratios.append(float(r))
    x = [d ** p for d in deltas]
    intercept, ierr, slope = _fit(x, ratios)
    return RatioSeries(body, float(R), n, deltas, deficits, errs, ratios, float(predicted),
                       intercept, ierr, slope, params.dir_resolution, params.mc.samples, params.mc.seed)


# --------------------------------------------------------------------------
# property suite


@dataclass
class BatteryEntry:
    name: str
    body: object
    R: float


@dataclass
class CheckResult:
    name: str
    body: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""


@dataclass
class PropertyReport:
    seed: int
    checks: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if not self.checks:
            return EXIT_NOTHING_RUN
        return EXIT_OK if all(c.passed for c in self.checks) else EXIT_CHECK_FAILED

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {"seed": self.seed, "exit_code": self.exit_code,
                "checks": [asdict(c) for c in self.checks]}


def default_battery() -> list[BatteryEntry]:
    return [
        BatteryEntry("unit-disk", make_ball([0.0, 0.0], 1.0), 2.0),
        BatteryEntry("ellipse-1.2x1", make_ellipsoid([1.2, 1.0]), 3.0),
        BatteryEntry("ellipsoid-1x1.1x1.2", make_ellipsoid([1.0, 1.1, 1.2]), 3.0),
    ]


def _check(report, name, body, measured, tol, passed=None, detail=""):
    ok = bool(measured <= tol) if passed is None else bool(passed)
    report.checks.append(CheckResult(name, body, ok, float(measured), float(tol), detail))
    logger.info("%s [%s]: %s (%.3g vs %.3g)", name, body, "pass" if ok else "FAIL", measured, tol)


def random_r_convex_ellipsoids(rng: np.random.Generator, count: int):
    """Random ellipsoids in R^2 and R^3 with a radius R they are R-ball convex for."""
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 4))
        axes = np.sort(rng.uniform(0.5, 2.0, n))
        E = make_ellipsoid(axes)
        kmin = axes[0] / axes[-1] ** 2
        out.append((E, float(rng.uniform(1.0, 5.0) / kmin)))
    return out


def run_property_suite(seed: int = 42, battery: list[BatteryEntry] | None = None,
                       constant: Callable[[int], float] = limit_constant,
                       samples: int = 200_000, dir_resolution: int = 128) -> PropertyReport:
    """Run the structural and analytic property checks on a body battery.

    An explicitly empty battery runs nothing and reports exit code 5.
    """
    battery = default_battery() if battery is None else battery
    report = PropertyReport(seed)
    if not battery:
        return report
    rng = np.random.default_rng(seed)
    mc = MCConfig(samples=samples, seed=seed)

    for entry in battery:
        K, R, name = entry.body, entry.R, entry.name
        n = K.dim
        res = dir_resolution if n == 2 else max(16, dir_resolution // 8)
        grid = sphere_grid(n - 1, res)
        asa_grid = sphere_grid(n - 1, 512 if n == 2 else 48)

        # homogeneity of degree n(n-1)/(n+1)
        base = relative_affine_surface_area(K, R, asa_grid)
        deg = n * (n - 1) / (n + 1)
        worst = max(abs(relative_affine_surface_area(K.scaled(a), a * R, asa_grid) - a ** deg * base)
                    / max(a ** deg * base, 1e-300) for a in (0.5, 2.0, 3.0))
        _check(report, "homogeneity", name, worst, 1e-8)

        # isoperimetric bound, strict for finite R
        bound = isoperimetric_bound(K)
        _check(report, "isoperimetric", name, base - bound, 0.0, passed=base < bound,
               detail=f"as={base:.9g} bound={bound:.9g}")

        # monotonicity in R
        larger = relative_affine_surface_area(K, 2 * R, asa_grid)
        _check(report, "monotone-in-R", name, base - larger, 0.0, passed=base <= larger)

        # hull: extensivity, idempotence, monotonicity
        hull = r_ball_hull(K, R, grid)
        pts = K.boundary_samples(2 * res)
        d_out = float(np.max(np.linalg.norm(pts[:, None, :] - hull.centers[None], axis=2).max(axis=1)) - R)
        _check(report, "hull-extensive", name, d_out, 1e-9)
        hull2 = r_ball_hull(hull, R, grid)
        _check(report, "hull-idempotent", name, hausdorff_distance(hull, hull2, grid), 1e-6)
        bigger = r_ball_hull(K.scaled(1.05), 1.05 * R, grid)
        inner = hull.boundary_samples(res)
        _check(report, "hull-monotone", name, float(np.mean(~bigger.contains(inner, tol=1e-9))), 0.0)

        # floating bodies: nesting, containment chain, cross-estimator
        deltas = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4] if n == 2 else [1e-2, 3e-3, 1e-3]
        prm = FloatParams(R=R, delta=deltas[0], dir_resolution=res, mc=mc,
                          xi_resolution=64 if n == 2 else 16)
        bodies = [floating_body(K, replace(prm, delta=d), grid) for d in deltas]
        probe = K.center + (K.bounding_radius * 1.05) * (
            2 * np.random.default_rng(seed + 1).random((20000, n)) - 1)
        probe = probe[K.contains(probe)]
        viol = 0
        for big, small in zip(bodies[1:], bodies[:-1]):
            viol += int(np.count_nonzero(small.contains(probe) & ~big.contains(probe, tol=1e-9)))
        _check(report, "floating-nested", name, viol, 0)
        deficits = [radial_volume_difference(K, b, sphere_grid(n - 1, 8 * res if n == 2 else 2 * res))
                    for b in bodies]
        _check(report, "deficit-monotone", name, float(np.max(np.diff(deficits))), 0.0)
        outside = sum(int(np.count_nonzero(~K.contains(b.boundary_samples(res), tol=1e-9)))
                      for b in bodies)
        _check(report, "containment-chain", name, outside, 0)
        fb = bodies[2]
        mcd = volume_deficit(K, replace(prm, delta=deltas[2]), fb)
        rad = radial_volume_difference(K, fb, sphere_grid(n - 1, 16 * res if n == 2 else 4 * res))
        _check(report, "cross-estimator", name, abs(mcd.value - rad), 3 * mcd.stderr)

        # scaling covariance with a = 2
        sc = scaling_covariance_check(K, 2.0, replace(prm, delta=1e-3), grid)
        tol = 3 * max(sc["depth_tolerance"], 1e-12)
        _check(report, "scaling-covariance", name, sc["hausdorff"], tol)
        _check(report, "scaling-covariance-volume", name,
               abs(sc["volume_left"] - sc["volume_right"]), 3 * sc["volume_stderr"] + 1e-12)

    # analytic identities independent of the battery bodies
    ellipsoids = random_r_convex_ellipsoids(rng, 50)
    gaps = [isoperimetric_bound(E) - relative_affine_surface_area(E, R) for E, R in ellipsoids]
    _check(report, "isoperimetric-random", "50 ellipsoids", -min(gaps), 0.0, passed=min(gaps) > 0)
    for label, cfg, R in (("two-disk", two_disk_configuration(1.0, 0.6), 2.0),
                          ("cut-ellipse", cut_ellipse_configuration(1.2, 1.0, 3.0, 0.05), 3.0)):
        v = valuation_defect(*cfg, R)
        _check(report, "valuation", label, abs(v["defect"]), 1e-4)

    disk = make_ball([0.0, 0.0], 1.0)
    series = verify_limit(disk, 2.0, [1e-3, 1e-4, 1e-5, 1e-6],
                          FloatParams(R=2.0, delta=1e-3, dir_resolution=64, mc=mc),
                          body="unit-disk", constant=constant)
    _check(report, "limit-consistency", "unit-disk", series.relative_error(), 5e-3)

    first = emit_csv_bytes(series)
    again = verify_limit(disk, 2.0, [1e-3, 1e-4, 1e-5, 1e-6],
                         FloatParams(R=2.0, delta=1e-3, dir_resolution=64,
                                     mc=replace(mc, substreams=4)),
                         body="unit-disk", constant=constant)
    _check(report, "determinism", "unit-disk", 0.0 if first == emit_csv_bytes(again) else 1.0, 0.0)
    return report


# --------------------------------------------------------------------------
# reports


def _num(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def emit_csv_bytes(series: RatioSeries) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in series.rows():
        w.writerow([_num(v) for v in row])
    return buf.getvalue().encode()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def report_bytes(obj, fmt: str | None = None) -> bytes:
    """Serialise a series (CSV by default) or any report/dict (JSON)."""
    if isinstance(obj, RatioSeries):
        if (fmt or "csv") == "csv":
            return emit_csv_bytes(obj)
        d = asdict(obj)
        d["relative_error"] = obj.relative_error()
        obj = d
    elif fmt == "csv":
        raise InvalidInputError("CSV output is only available for ratio series")
    if isinstance(obj, PropertyReport):
        obj = obj.to_dict()
    return (json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n").encode()


def emit_report(obj, path, fmt: str | None = None) -> None:
    """Write a report to ``path``; output is byte-identical for identical inputs."""
    _write(report_bytes(obj, fmt), path)


def emit_text(text: str, path) -> None:
    _write(text.encode(), path)


def _write(data: bytes, path) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise ReportIOError(f"cannot write {path}: directory {directory} does not exist")
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise ReportIOError(f"cannot write {path} in {directory}: {exc.strerror}") from exc
