"""Relative affine surface area, sphere integrals and ellipsoid caps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (DivergentIntegralError, InvalidInputError, NotLConvexError,
                     NotRBallConvexError)
from .floating import CapQuadrature, Estimate
from .geometry import Ellipsoid, normalize, sphere_measure, unit_ball_volume
from .montecarlo import mc_volume
from .quadrature import SphereGrid, sphere_grid, surface_integral
from .rng import MCConfig, map_blocks, uniform_directions

CLAMP = 1e-12


def limit_constant(n: int) -> float:
    """``c_n = (1/2) ((n + 1) / vol_{n-1}(B^{n-1}))^{2/(n+1)}``."""
    if n < 2:
        raise InvalidInputError("dimension must be at least 2")
    return 0.5 * ((n + 1) / unit_ball_volume(n - 1)) ** (2.0 / (n + 1))


# --------------------------------------------------------------------------
# int_{S^{m-1}} dsigma / (sum c_i xi_i^2)^{m/2}


def _coefficients(c) -> np.ndarray:
    c = np.asarray(c, dtype=float).reshape(-1)
    if c.size < 1:
        raise InvalidInputError("need at least one coefficient")
    if not np.all(np.isfinite(c)):
        raise InvalidInputError("coefficients must be finite")
    if np.any(c <= 0):
        raise DivergentIntegralError(f"non-positive coefficient in {c.tolist()}: the integral diverges")
    return c


def sphere_reciprocal_quadratic_integral(c) -> float:
    """Closed form ``sigma(S^{m-1}) / prod sqrt(c_i)`` of the reciprocal-quadratic integral.

    Examples
    --------
    >>> round(sphere_reciprocal_quadratic_integral([1, 4, 9]), 12) == round(2 * math.pi / 3, 12)
    True
    """
    c = _coefficients(c)
    return sphere_measure(c.size - 1) / float(np.prod(np.sqrt(c)))


def _integrand(c, xi):
    return np.sum(c * xi * xi, axis=-1) ** (-0.5 * c.size)


def sphere_reciprocal_quadratic_mc(c, mc: MCConfig, stream: int = 3) -> Estimate:
    """Monte Carlo version with uniformly distributed directions."""
    c = _coefficients(c)
    m = c.size
    if m == 1:
        return Estimate(2.0 / math.sqrt(c[0]), 0.0)

    def part(gen, size):
        f = _integrand(c, uniform_directions(gen, size, m))
        return [f.sum(), (f * f).sum()]

    s, s2 = map_blocks(mc, part, stream)
    N = mc.samples
    mean = s / N
    sig = sphere_measure(m - 1)
    return Estimate(sig * mean, sig * math.sqrt(max(s2 / N - mean * mean, 0.0) / N))


def sphere_reciprocal_quadratic_quadrature(c, resolution: int = 256) -> float:
    """Product-grid quadrature version."""
    c = _coefficients(c)
    g = sphere_grid(c.size - 1, resolution)
    return float(np.sum(g.weights * _integrand(c, g.nodes)))


# --------------------------------------------------------------------------
# relative affine surface area


def _gap_power(gap, n, where_msg, U, err):
    bad = gap < -CLAMP
    if np.any(bad):
        i = int(np.flatnonzero(bad.any(axis=-1))[0])
        raise err(f"{where_msg} at direction {U[i].tolist()} (gap {gap[i].min():.3g})")
    return np.prod(np.maximum(gap, 0.0) ** (1.0 / (n + 1)), axis=-1)


def relative_affine_surface_area(K, R: float, grid: SphereGrid | None = None) -> float:
    """``as^R(K) = int_{dK} prod_i (kappa_i - 1/R)^{1/(n+1)} dmu``.

    ``R = inf`` gives the classical affine surface area.  Gaps within
    ``-1e-12`` are clamped to zero.
    """
    if not (R > 0):
        raise InvalidInputError("R must be positive")
    n = K.dim
    grid = grid or sphere_grid(n - 1, 512 if n == 2 else 64)
    inv = 0.0 if math.isinf(R) else 1.0 / R
    U = grid.nodes

    def f(x, u, kappa):
        return _gap_power(kappa - inv, n, f"curvature below 1/R={inv:.6g}", U, NotRBallConvexError)

    return surface_integral(K, f, grid)


def relative_affine_surface_area_L(K, L, grid: SphereGrid | None = None) -> float:
    """Affine surface area of K relative to L.

    Curvatures of K and L at the common normal are paired in ascending order.
    """
    if K.dim != L.dim:
        raise InvalidInputError("K and L must have the same dimension")
    n = K.dim
    grid = grid or sphere_grid(n - 1, 512 if n == 2 else 64)
    U = grid.nodes
    kl, _ = L.curvatures(U)

    def f(x, u, kappa):
        return _gap_power(kappa - kl, n, "K is flatter than L", U, NotLConvexError)

    return surface_integral(K, f, grid)


def isoperimetric_bound(K) -> float:
    """``n vol(B^n)^{2/(n+1)} vol(K)^{(n-1)/(n+1)}``, an upper bound for as^R(K)."""
    n = K.dim
    return n * unit_ball_volume(n) ** (2.0 / (n + 1)) * float(K.volume) ** ((n - 1.0) / (n + 1))


# --------------------------------------------------------------------------
# ellipsoid caps


@dataclass(frozen=True)
class CapSpec:
    """Cap of the ellipsoid tangent to ``x_n = 0`` at the origin, cut by ``B(z, R)``.

    The ellipsoid is ``sum_{i<n} x_i^2/a_i^2 + (x_n - a_n)^2/a_n^2 <= 1`` and
    ``z = (0, ..., 0, a)`` with ``a = R + h``.
    """

    semiaxes: tuple
    R: float
    h: float

    def __post_init__(self):
        a = np.asarray(self.semiaxes, dtype=float)
        if a.ndim != 1 or a.size < 2 or not np.all(a > 0):
            raise InvalidInputError("semiaxes must be at least two positive numbers")
        if np.any(np.diff(a) < 0):
            raise InvalidInputError("semiaxes must be sorted ascending")
        if not (self.h >= 0):
            raise InvalidInputError("cap height must be non-negative")
        if not (self.R >= a[-1]):
            raise InvalidInputError("R must be at least the largest semiaxis")
        object.__setattr__(self, "semiaxes", tuple(float(x) for x in a))

    @property
    def dim(self) -> int:
        return len(self.semiaxes)

    @property
    def a(self) -> float:
        return self.R + self.h

    def coefficients(self) -> np.ndarray:
        ax = np.asarray(self.semiaxes)
        return ax[-1] / ax[:-1] ** 2 - 1.0 / self.R


def ellipsoid_cap_volume_asymptotic(spec: CapSpec, grid: SphereGrid | None = None) -> float:
    """Leading-order cap volume as ``h -> 0``.

    ``2^{(n+1)/2} / ((n-1)(n+1)) h^{(n+1)/2} int_{S^{n-2}} dsigma /
    (sum (a_n/a_i^2 - 1/R) xi_i^2)^{(n-1)/2}``, with the sphere integral in
    closed form, or on ``grid`` when one is given.
    """
    n = spec.dim
    c = spec.coefficients()
    if grid is None:
        integral = sphere_reciprocal_quadratic_integral(c)
    else:
        c = _coefficients(c)
        if grid.dim != n - 2:
            raise InvalidInputError("grid must live on S^{n-2}")
        integral = float(np.sum(grid.weights * _integrand(c, grid.nodes)))
    return 2 ** ((n + 1) / 2) / ((n - 1) * (n + 1)) * spec.h ** ((n + 1) / 2) * integral


def _cap_box(spec: CapSpec):
    ax = np.asarray(spec.semiaxes)
    n, R, a = spec.dim, spec.R, spec.a
    an = ax[-1]

    def lower_ellipsoid(r, ai):
        return an - an * np.sqrt(max(1.0 - (r / ai) ** 2, 0.0))

    def lower_ball(r):
        return a - math.sqrt(R * R - r * r)

    ext = np.empty(n - 1)
    for i in range(n - 1):
        top = min(ax[i], R)
        g = lambda r: lower_ball(r) - lower_ellipsoid(r, ax[i])
        ext[i] = top if g(top) > 0 else brentq(g, 0.0, top, xtol=1e-15)
    ext = np.minimum(1.1 * ext, np.minimum(ax[:-1], R))
    # the ball's lower surface bounds the cap from above inside its footprint
    hmax = min(lower_ball(float(ext.max())), 2 * an)
    lo = np.concatenate([-ext, [0.0]])
    hi = np.concatenate([ext, [hmax]])
    return lo, hi


def ellipsoid_cap_volume_exact(spec: CapSpec, mc: MCConfig, stream: int = 9) -> Estimate:
    """Monte Carlo volume of the ellipsoid minus ``B(z, R)``.

    Samples a box around the cap (the region near the tangency point where
    the ellipsoid lies below the ball), so the hit rate does not degrade as
    h shrinks.
    """
    if spec.h == 0:
        return Estimate(0.0, 0.0)
    if np.any(spec.coefficients() <= 0):
        raise DivergentIntegralError("cap is not localised: some coefficient a_n/a_i^2 - 1/R is non-positive")
    ax = np.asarray(spec.semiaxes)
    E, z = _cap_geometry(spec)
    centre = E.center

    def region(p):
        inside = np.sum(((p - centre) / ax) ** 2, axis=1) <= 1.0
        return inside & (np.sum((p - z) ** 2, axis=1) > spec.R ** 2)

    est, se = mc_volume(region, _cap_box(spec), mc, stream)
    return Estimate(est, se)


def _cap_geometry(spec: CapSpec):
    ax = np.asarray(spec.semiaxes)
    centre = np.zeros(spec.dim)
    centre[-1] = ax[-1]
    z = np.zeros(spec.dim)
    z[-1] = spec.a
    return Ellipsoid(ax, centre), z


def ellipsoid_cap_volume_quadrature(spec: CapSpec, xi_resolution: int = 256,
                                    radial_nodes: int = 64) -> float:
    """Deterministic cap volume: the gap between the two lower surfaces, integrated in polar coordinates."""
    if spec.h == 0:
        return 0.0
    E, z = _cap_geometry(spec)
    down = np.zeros(spec.dim)
    down[-1] = -1.0
    cq = CapQuadrature(E, spec.R, xi_resolution, radial_nodes)
    return float(cq.volumes(z[None], down[None])[0])


def pointwise_deficit_rate(K, u, R: float) -> float:
    """Predicted limit of the normalised normal displacement at direction u.

    ``(1/2)(n^2 - 1)^{2/(n+1)} [int_{S^{n-2}} dsigma / (sum (kappa_i - 1/R)
    xi_i^2)^{(n-1)/2}]^{-2/(n+1)}``.
    """
    u = normalize(np.asarray(u, dtype=float))
    n = K.dim
    kappa, _ = K.curvatures(u)
    integral = sphere_reciprocal_quadratic_integral(np.asarray(kappa) - 1.0 / R)
    return 0.5 * (n * n - 1) ** (2.0 / (n + 1)) * integral ** (-2.0 / (n + 1))
