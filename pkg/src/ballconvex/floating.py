"""Cross-variogram, exact-volume cutting balls and R-ball floating bodies."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .ballpoly import BallPolyhedron
from .errors import EmptyBodyError, InfeasibleCutError, InvalidInputError
from .geometry import Ball, normalize, sphere_measure, tangent_basis
from .errors import NotRBallConvexError
from .hull import hausdorff_distance, min_curvature
from .montecarlo import mc_volume
from .quadrature import SphereGrid, gauss_legendre, sphere_grid
from .rng import MCConfig, map_blocks, uniform_directions

logger = logging.getLogger(__name__)


class Estimate(NamedTuple):
    value: float
    stderr: float


@dataclass(frozen=True)
class FloatParams:
    """Settings for floating-body construction.

    ``bisect_tol`` is the relative cut-volume tolerance every cutting ball is
    certified against; the root search itself runs to near machine precision.
    ``xi_resolution`` and ``radial_nodes`` set the cap-volume quadrature.
    """

    R: float
    delta: float
    dir_resolution: int = 256
    mc: MCConfig = field(default_factory=MCConfig)
    bisect_tol: float = 1e-3
    xi_resolution: int = 64
    radial_nodes: int = 32

    def __post_init__(self):
        if not (self.R > 0):
            raise InvalidInputError(f"R must be positive, got {self.R}")
        if not (self.delta >= 0):
            raise InvalidInputError(f"delta must be non-negative, got {self.delta}")
        if not (0 < self.bisect_tol <= 1e-3):
            raise InvalidInputError("bisect_tol must lie in (0, 1e-3]")
        if self.dir_resolution < 1:
            raise InvalidInputError("dir_resolution must be positive")


@dataclass(frozen=True)
class CutBall:
    direction: np.ndarray
    ball: Ball
    cut_volume: float
    depth: float


def direction_grid(dim: int, resolution: int) -> SphereGrid:
    return sphere_grid(dim - 1, resolution)


# --------------------------------------------------------------------------
# cross-variogram


def cross_variogram(K, C: Ball, x, mc: MCConfig, stream: int = 0) -> Estimate:
    """Monte Carlo estimate of ``vol(K cap (x + C))``."""
    shifted = C.translated(x)
    klo, khi = K.bounding_box()
    clo, chi = shifted.bounding_box()
    lo, hi = np.maximum(klo, clo), np.minimum(khi, chi)
    if np.any(hi <= lo):
        return Estimate(0.0, 0.0)
    est, se = mc_volume(lambda p: K.contains(p) & shifted.contains(p), (lo, hi), mc, stream)
    return Estimate(est, se)


def body_volume(K) -> float:
    if K.volume is None:
        raise InvalidInputError("body has no exact volume; supply volume_hint")
    return float(K.volume)


# --------------------------------------------------------------------------
# cap volumes by quadrature


def _bracket_root(f, a, b, fa, fb, iters=200, rtol=1e-15):
    """Vectorised Illinois (modified regula falsi) on sign-changing brackets.

    ``fa`` and ``fb`` must have opposite signs elementwise.  Non-finite trial
    values fall back to bisection.
    """
    a, b, fa, fb = (np.array(z, dtype=float) for z in (a, b, fa, fb))
    last = np.zeros(a.shape, dtype=int)
    for _ in range(iters):
        width = np.abs(b - a)
        if np.all(width <= rtol * np.maximum(np.abs(a), np.abs(b)) + 1e-300):
            break
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            c = (a * fb - b * fa) / (fb - fa)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        bad = ~np.isfinite(c) | (c <= lo) | (c >= hi)
        c = np.where(bad, 0.5 * (a + b), c)
        fc = f(c)
        fc = np.where(np.isnan(fc), -np.inf, fc)
        same_a = np.sign(fc) == np.sign(fa)
        zero = fc == 0
        # replace the endpoint with the same sign; Illinois halves the stale one
        fb = np.where(same_a & (last == 1), 0.5 * fb, fb)
        fa = np.where(~same_a & (last == -1), 0.5 * fa, fa)
        a = np.where(same_a, c, a)
        fa = np.where(same_a, fc, fa)
        b = np.where(~same_a, c, b)
        fb = np.where(~same_a, fc, fb)
        last = np.where(same_a, 1, -1)
        a = np.where(zero, c, a)
        b = np.where(zero, c, b)
    return np.where(np.abs(fa) < np.abs(fb), a, b)


class CapQuadrature:
    """Volume of ``K minus B(center, R)`` for caps around an axis.

    The cap is written as a graph over the hyperplane orthogonal to the axis
    through the ball centre: in polar coordinates ``(rho, xi)`` of that
    hyperplane the cap occupies heights between the upper ball surface and
    the upper boundary of K, up to the radius ``rho(xi)`` where the two meet.
    Assumes the cap is the only part of K outside the ball, which holds for
    cutting balls obtained by pushing an internally tangent ball inward.
    """

    def __init__(self, K, R: float, xi_resolution: int = 64, radial_nodes: int = 32):
        self.K = K
        self.R = float(R)
        n = K.dim
        self.xi = sphere_grid(n - 2, xi_resolution)
        self.gl_x, self.gl_w = gauss_legendre(radial_nodes, 0.0, 1.0)
        self.n = n
        self.rho_max = min(self.R, 2.0 * K.bounding_radius) * (1 - 1e-12)
        self.scan = self.rho_max * np.logspace(-9, 0, 28)

    def _segment(self, C, U, dirs, rho):
        """Length of the chord of K above the ball's upper surface at radius ``rho``.

        Shapes: C, U (D, n); dirs (D, q, n); rho (D, q, ...).  Chords are
        taken from the level of the ball's top, ``C + R u``, and the ball
        surface height is written relative to it in cancellation-free form,
        so huge radii stay accurate.
        """
        extra = (None,) * (rho.ndim - 2)
        top_pt = (C + self.R * U)[(slice(None), None) + extra]
        pts = top_pt + rho[..., None] * dirs[(slice(None), slice(None)) + extra]
        Ub = np.broadcast_to(U[(slice(None), None) + extra], pts.shape)
        lo, hi = self.K.chord(pts, Ub)
        with np.errstate(invalid="ignore"):
            drop = -rho ** 2 / (self.R + np.sqrt(self.R ** 2 - rho ** 2))
        return hi - np.fmax(drop, lo), drop

    def gap(self, C, U, dirs, rho):
        seg, top = self._segment(C, U, dirs, rho)
        return np.where(np.isnan(seg), -np.inf, seg)

    def volumes(self, C, U):
        C = np.atleast_2d(C)
        U = normalize(np.atleast_2d(U))
        D = len(C)
        T = tangent_basis(U)
        dirs = np.einsum("dik,qk->dqi", T, self.xi.nodes)
        q = dirs.shape[1]
        g0 = self.gap(C, U, dirs, np.zeros((D, q)))
        active = g0 > 0
        if not np.any(active):
            return np.zeros(D)
        # first sign change on a geometric radius ladder
        rho = np.broadcast_to(self.scan, (D, q, len(self.scan)))
        g = self.gap(C, U, dirs, rho)
        neg = g <= 0
        has = neg.any(axis=2)
        k = np.argmax(neg, axis=2)
        k = np.where(has, k, len(self.scan) - 1)
        hi = self.scan[k]
        lo = np.where(k > 0, self.scan[np.maximum(k - 1, 0)], 0.0)
        ghi = np.where(has, np.take_along_axis(g, k[..., None], axis=2)[..., 0], -1.0)
        glo = np.where(k > 0, np.take_along_axis(g, np.maximum(k - 1, 0)[..., None], axis=2)[..., 0], g0)
        ok = active & (glo > 0) & has
        rstar = np.where(active & ~has, self.rho_max, 0.0)
        if np.any(ok):
            f = lambda r: self.gap(C, U, dirs, r)
            lo_ = np.where(ok, lo, 0.0)
            hi_ = np.where(ok, hi, 1.0)
            glo_ = np.where(ok, glo, 1.0)
            ghi_ = np.where(ok, ghi, -1.0)
            # the integrand vanishes at the root, so its error enters only at second order
            root = _bracket_root(f, lo_, hi_, glo_, ghi_, rtol=1e-12)
            rstar = np.where(ok, root, rstar)
        r = rstar[..., None] * self.gl_x
        seg, _ = self._segment(C, U, dirs, r)
        seg = np.where(np.isfinite(seg) & (seg > 0), seg, 0.0)
        inner = np.sum(seg * r ** (self.n - 2) * self.gl_w, axis=2) * rstar
        return np.where(active.any(axis=1), inner @ self.xi.weights, 0.0)


def cut_volume(K, b: Ball, mc: MCConfig | None = None, axis=None,
               xi_resolution: int = 64, radial_nodes: int = 32) -> Estimate:
    """``vol(K minus b)``.

    With ``mc`` the covariogram route ``vol(K) - g_{K,B}(center)`` is used
    (hit-or-miss, with standard error).  Without it the cap is integrated by
    quadrature around ``axis`` (default: from the ball centre towards the
    body's centre), which is accurate for small caps.
    """
    if mc is not None:
        g = cross_variogram(K, Ball(np.zeros(K.dim), b.radius), b.center, mc)
        return Estimate(body_volume(K) - g.value, g.stderr)
    if axis is None:
        axis = K.center - b.center
        if np.linalg.norm(axis) == 0:
            axis = np.eye(K.dim)[-1]
    cq = CapQuadrature(K, b.radius, xi_resolution, radial_nodes)
    v = cq.volumes(b.center[None], np.asarray(axis, dtype=float)[None])[0]
    return Estimate(float(v), 0.0)


# --------------------------------------------------------------------------
# exact cuts and floating bodies


def require_r_ball_convex(K, R: float, tol: float = 1e-12) -> None:
    kmin, _ = min_curvature(K)
    if kmin < 1.0 / R - tol:
        raise NotRBallConvexError(
            f"body is not {R}-ball convex: minimal curvature {kmin:.6g} < 1/R = {1.0 / R:.6g}")


def exact_cut_depths(K, U, params: FloatParams, check: bool = True):
    """Depths t(u) such that ``B(p(u) - (R + t) u, R)`` cuts exactly delta from K."""
    U = normalize(np.atleast_2d(U))
    R, delta = params.R, params.delta
    if check:
        require_r_ball_convex(K, R)
    P = K.boundary_point(U)
    D = len(U)
    if delta == 0:
        return np.zeros(D), np.zeros(D)
    vol = body_volume(K)
    if delta >= vol / 2:
        raise InfeasibleCutError(f"delta={delta} must be below vol(K)/2={vol / 2}")
    cq = CapQuadrature(K, R, params.xi_resolution, params.radial_nodes)
    power = 2.0 / (K.dim + 1)

    def cut(t):
        return cq.volumes(P - (R + t)[:, None] * U, U)

    def F(t):
        return np.maximum(cut(t), 0.0) ** power - delta ** power

    t_max = 2.0 * K.bounding_radius
    hi = np.full(D, 1e-6 * R)
    fhi = F(hi)
    while True:
        need = fhi <= 0
        if not np.any(need):
            break
        if np.any(hi[need] >= t_max):
            i = int(np.flatnonzero(need & (hi >= t_max))[0])
            raise InfeasibleCutError(
                f"no bracket for exact cut in direction {U[i].tolist()} within t <= {t_max}")
        hi = np.where(need, np.minimum(4 * hi, t_max), hi)
        fhi = np.where(need, F(hi), fhi)
    lo = np.where(hi > 1e-6 * R, 0.25 * hi, 0.0)
    flo = F(lo)
    t = _bracket_root(F, lo, hi, flo, fhi)
    return t, cut(t)


def exact_cut_ball(K, u, params: FloatParams) -> CutBall:
    """Ball on the inward normal line at u cutting off volume delta from K."""
    u = normalize(np.asarray(u, dtype=float))
    t, v = exact_cut_depths(K, u[None], params)
    p = K.boundary_point(u)
    return CutBall(u, Ball(p - (params.R + t[0]) * u, params.R), float(v[0]), float(t[0]))


class FloatingBody(BallPolyhedron):
    """Ball polyhedron built from exact-delta cutting balls, with its certificate."""

    def __init__(self, radius, centers, witness, directions, depths, cut_volumes, delta):
        super().__init__(radius, centers, witness)
        self.directions = np.asarray(directions)
        self.depths = np.asarray(depths)
        self.cut_volumes = np.asarray(cut_volumes)
        self.delta = float(delta)

    def certificate(self) -> list[dict]:
        return [{"direction": u.tolist(), "depth": float(t), "cut_volume": float(v)}
                for u, t, v in zip(self.directions, self.depths, self.cut_volumes)]

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["delta"] = self.delta
        d["certificate"] = self.certificate()
        return d


def floating_body(K, params: FloatParams, grid: SphereGrid | None = None) -> FloatingBody:
    """Discretised R-ball floating body: intersection of exact-delta balls.

    One ball per direction of ``grid`` (default ``sphere_grid(n-1,
    dir_resolution)``), centred on the inward normal line of K at that
    direction.  Each ball cuts exactly delta, so it contains the true
    floating body; the intersection converges to it as the grid is refined.
    """
    grid = grid or direction_grid(K.dim, params.dir_resolution)
    U = grid.nodes
    t, vols = exact_cut_depths(K, U, params)
    centers = K.boundary_point(U) - (params.R + t)[:, None] * U
    if params.delta > 0:
        rel = np.abs(vols - params.delta) / params.delta
        if np.any(rel > params.bisect_tol):
            i = int(np.argmax(rel))
            raise InfeasibleCutError(f"cut volume {vols[i]} misses delta={params.delta} at {U[i].tolist()}")
    return FloatingBody(params.R, centers, K.center, U, t, vols, params.delta)


def recertify(K, fb: FloatingBody, params: FloatParams, factor: int = 4) -> np.ndarray:
    """Re-measure every cut volume with ``factor`` times more quadrature nodes.

    Returns the relative deviations ``|v - delta| / delta``.
    """
    xi_res = params.xi_resolution * (factor if K.dim > 2 else 1)
    nodes = params.radial_nodes * (factor if K.dim == 2 else 1)
    cq = CapQuadrature(K, fb.radius, xi_res, nodes)
    v = cq.volumes(fb.centers, fb.directions)
    if fb.delta == 0:
        return np.abs(v)
    return np.abs(v - fb.delta) / fb.delta


# --------------------------------------------------------------------------
# volume deficit estimators


def polar_volume_difference(K, L, mc: MCConfig, origin=None, stream: int = 7) -> Estimate:
    """Monte Carlo estimate of ``vol(K) - vol(L)`` in polar coordinates.

    ``vol(K) - vol(L) = (1/n) int_{S^{n-1}} rho_K^n - rho_L^n dsigma`` about a
    common interior point; directions are sampled uniformly.
    """
    n = K.dim
    o = K.center if origin is None else np.asarray(origin, dtype=float)
    sig = sphere_measure(n - 1)

    def part(gen, size):
        v = uniform_directions(gen, size, n)
        f = (K.radial(v, o) ** n - L.radial(v, o) ** n) / n
        return [f.sum(), (f * f).sum()]

    s, s2 = map_blocks(mc, part, stream)
    N = mc.samples
    mean = s / N
    var = max(s2 / N - mean * mean, 0.0)
    return Estimate(sig * mean, sig * float(np.sqrt(var / N)))


def volume_deficit(K, params: FloatParams, fb: FloatingBody | None = None,
                   method: str = "hitmiss") -> Estimate:
    """``vol(K) - vol(floating body)`` with Monte Carlo standard error.

    ``method="hitmiss"`` samples the bounding box of the ball polyhedron;
    ``method="polar"`` averages ``rho_K^n - rho_P^n`` over random directions,
    which has far smaller variance for small deficits.
    """
    fb = fb if fb is not None else floating_body(K, params)
    if not fb.contains(K.center[None])[0]:
        raise InvalidInputError("body centre is not inside the floating body")
    if method == "polar":
        return polar_volume_difference(K, fb, params.mc, origin=K.center)
    if method != "hitmiss":
        raise InvalidInputError(f"unknown method {method!r}")
    est, se = mc_volume(fb.contains, fb.bounding_box(), params.mc, stream=5)
    return Estimate(body_volume(K) - est, se)


def _radial_by_bisection(L, x, tol):
    lo = np.zeros(len(x))
    hi = np.ones(len(x))
    inside = L.contains(x)
    out = np.ones(len(x))
    todo = ~inside
    for _ in range(200):
        if not np.any(todo) or np.max(hi - lo) * np.max(np.linalg.norm(x, axis=1)) < tol:
            break
        mid = 0.5 * (lo + hi)
        m_in = L.contains(mid[:, None] * x)
        lo = np.where(m_in, mid, lo)
        hi = np.where(m_in, hi, mid)
    out = np.where(todo, 0.5 * (lo + hi), 1.0)
    return out


def radial_volume_difference(K, L, grid: SphereGrid, tol: float | None = None) -> float:
    """``vol(K) - vol(L)`` from the boundary integral over K.

    Evaluates ``(1/n) int_{dK} <x, N_K(x)> [1 - (|x_L| / |x|)^n] dmu_K`` where
    x_L is the boundary point of L on the segment [0, x].  L must contain the
    origin in its interior.  Uses L's exact radial function when available,
    otherwise bisection on membership to ``tol`` (default 1e-9 times the
    bounding radius).
    """
    n = K.dim
    zero = np.zeros((1, n))
    if isinstance(L, BallPolyhedron):
        interior = np.max(np.linalg.norm(L.centers, axis=1)) < L.radius
    elif hasattr(L, "level"):
        interior = L.level(zero)[0] < 0
    else:
        interior = bool(L.contains(zero)[0])
    if not interior:
        raise InvalidInputError("origin is not interior to L")
    kappa, fk = K.curvatures(grid.nodes)
    x = K.boundary_point(grid.nodes)
    r = np.linalg.norm(x, axis=1)
    if hasattr(L, "radial"):
        rl = L.radial(x / r[:, None], np.zeros(n))
        frac = rl / r
    else:
        tol = tol or 1e-9 * K.bounding_radius
        frac = _radial_by_bisection(L, x, tol)
    frac = np.minimum(frac, 1.0) if not isinstance(L, BallPolyhedron) else frac
    h = np.sum(x * grid.nodes, axis=1)
    return float(np.sum(grid.weights * fk * h * (1 - frac ** n)) / n)


# --------------------------------------------------------------------------
# convolution bodies and affine covariance


def covariogram(K, x, mc: MCConfig, stream: int = 11) -> Estimate:
    """``g_K(x) = vol(K cap (x + K))``."""
    klo, khi = K.bounding_box()
    x = np.asarray(x, dtype=float)
    lo, hi = np.maximum(klo, klo + x), np.minimum(khi, khi + x)
    if np.any(hi <= lo):
        return Estimate(0.0, 0.0)
    est, se = mc_volume(lambda p: K.contains(p) & K.contains(p - x), (lo, hi), mc, stream)
    return Estimate(est, se)


def convolution_body(K, delta: float, mc: MCConfig, dir_resolution: int, iters: int = 30):
    """Support function of ``C(delta, K) = (1/2) {x : g_K(x) >= delta}``.

    Returns ``(grid, support)``.  Along each ray the covariogram is even and
    unimodal for convex K, so the boundary is found by bisection on the
    Monte Carlo covariogram (common random numbers across evaluations).
    """
    vol = body_volume(K)
    if delta > vol:
        raise EmptyBodyError(f"delta={delta} exceeds vol(K)={vol}")
    if delta <= 0:
        raise InvalidInputError("delta must be positive")
    grid = direction_grid(K.dim, dir_resolution)
    if delta >= vol:
        return grid, np.zeros(len(grid))
    out = np.empty(len(grid))
    width = 2.0 * K.bounding_radius
    for i, v in enumerate(grid.nodes):
        lo, hi = 0.0, width
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            if covariogram(K, mid * v, mc).value >= delta:
                lo = mid
            else:
                hi = mid
        out[i] = 0.25 * (lo + hi)
    return grid, out


def scaling_covariance_check(K, a: float, params: FloatParams, grid: SphereGrid | None = None) -> dict:
    """Compare ``(aK)^{aR}_delta`` with ``a (K^R_{delta / a^n})``.

    Both floating bodies are built independently on the same direction grid
    and compared by support-function distance and polar-coordinate volume.
    """
    if not (a > 0):
        raise InvalidInputError("scale factor must be positive")
    n = K.dim
    grid = grid or direction_grid(n, params.dir_resolution)
    left = floating_body(K.scaled(a), replace(params, R=a * params.R), grid)
    right = floating_body(K, replace(params, delta=params.delta / a ** n), grid).scaled(a)
    dist = hausdorff_distance(left, right, grid)
    aK = K.scaled(a)
    vl = polar_volume_difference(aK, left, params.mc, origin=aK.center)
    vr = polar_volume_difference(aK, right, params.mc, origin=aK.center)
    vol = body_volume(aK)
    depth_tol = params.bisect_tol * float(np.max(left.depths)) if params.delta > 0 else 0.0
    return {
        "scale": a,
        "hausdorff": dist,
        "volume_left": vol - vl.value,
        "volume_right": vol - vr.value,
        "volume_stderr": float(np.hypot(vl.stderr, vr.stderr)),
        "depth_tolerance": depth_tol,
    }
