"""Convex body oracles: balls and axis-aligned ellipsoids.

A body is described by what the rest of the package needs to ask it:
support function, the inverse Gauss map (boundary point with a given outer
normal), principal curvatures at that point, membership, and line
intersections.  All oracle methods are vectorised over a leading batch axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SUPPORTED_DIMS = (2, 3, 4, 5)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_measure(dim: int) -> float:
    """Surface measure of the unit sphere S^dim (2 for S^0)."""
    m = dim + 1
    return 2 * math.pi ** (m / 2) / math.gamma(m / 2)


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def tangent_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal bases of the hyperplanes orthogonal to unit vectors ``u``.

    Returns an array of shape ``u.shape + (n-1,)`` whose columns span u^perp.
    Built from the Householder reflection exchanging e_n and -sign(u_n) u.
    """
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    s = np.where(u[..., -1] >= 0, 1.0, -1.0)
    w = u.copy()
    w[..., -1] += s
    wn = np.sum(w * w, axis=-1)[..., None, None]
    eye = np.eye(n)
    H = eye - 2.0 * w[..., :, None] * w[..., None, :] / wn
    return H[..., :, : n - 1]


def _check_dim(n: int) -> None:
    if n not in SUPPORTED_DIMS:
        raise InvalidInputError(f"dimension {n} not supported (expected one of {SUPPORTED_DIMS})")


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball ``center + radius * B``."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        object.__setattr__(self, "center", c)
        if not (float(self.radius) > 0):
            raise InvalidInputError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        d2 = np.sum((np.asarray(points, dtype=float) - self.center) ** 2, axis=-1)
        return d2 <= (self.radius * (1 + tol)) ** 2

    def support(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return u @ self.center + self.radius * np.linalg.norm(u, axis=-1)

    def chord(self, points, direction):
        """Parameters ``(lo, hi)`` with ``points + s*direction`` in the ball; NaN if missed."""
        p = np.asarray(points, dtype=float) - self.center
        d = np.asarray(direction, dtype=float)
        a = np.sum(d * d, axis=-1)
        b = np.sum(p * d, axis=-1)
        c = np.sum(p * p, axis=-1) - self.radius ** 2
        disc = b * b - a * c
        with np.errstate(invalid="ignore"):
            sq = np.sqrt(disc)
        lo = np.where(disc >= 0, (-b - sq) / a, np.nan)
        hi = np.where(disc >= 0, (-b + sq) / a, np.nan)
        return lo, hi

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def translated(self, x) -> "Ball":
        return Ball(self.center + np.asarray(x, dtype=float), self.radius)

    def scaled(self, a: float) -> "Ball":
        return Ball(a * self.center, a * self.radius)

    @property
    def volume(self) -> float:
        return unit_ball_volume(self.dim) * self.radius ** self.dim


class ConvexBodyOracle:
    """Interface of a smooth convex body given by oracles.

    Subclasses provide ``dim``, ``center`` (an interior point), ``volume``
    (``None`` when unknown), ``bounding_radius`` (K lies in the origin-centred
    ball of that radius) and the vectorised methods below.
    """

    dim: int
    center: np.ndarray
    volume: float | None = None

    @property
    def bounding_radius(self) -> float:
        raise NotImplementedError

    def support(self, u):
        raise NotImplementedError

    def boundary_point(self, u):
        raise NotImplementedError

    def curvatures(self, u):
        """Return ``(kappa, weight)``.

        ``kappa`` has shape ``(..., n-1)`` (principal curvatures at the
        boundary point with outer normal ``u``, ascending) and ``weight`` is
        the curvature function f_K(u) = 1 / Gauss curvature, i.e. the area
        element of the boundary pulled back to the sphere.
        """
        raise NotImplementedError

    def contains(self, points, tol: float = 0.0):
        raise NotImplementedError

    def chord(self, points, direction):
        raise NotImplementedError

    def radial(self, v, origin=None):
        """Distance from ``origin`` (default ``center``) to the boundary along ``v``."""
        o = self.center if origin is None else np.asarray(origin, dtype=float)
        v = np.asarray(v, dtype=float)
        _, hi = self.chord(np.broadcast_to(o, v.shape), v)
        return hi

    def bounding_box(self):
        n = self.dim
        e = np.eye(n)
        return -self.support(-e), self.support(e)

    def boundary_samples(self, resolution: int) -> np.ndarray:
        """Boundary points parametrised both by normal and by radial direction."""
        from .quadrature import sphere_grid

        g = sphere_grid(self.dim - 1, resolution)
        pts = [self.boundary_point(g.nodes)]
        pts.append(self.center + self.radial(g.nodes)[:, None] * g.nodes)
        return np.concatenate(pts, axis=0)


class Ellipsoid(ConvexBodyOracle):
    """Axis-aligned ellipsoid ``{x : sum(((x - center) / semiaxes)**2) <= 1}``."""

    def __init__(self, semiaxes, center=None):
        a = np.asarray(semiaxes, dtype=float).reshape(-1)
        _check_dim(a.size)
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise InvalidInputError(f"semiaxes must be positive, got {a.tolist()}")
        c = np.zeros_like(a) if center is None else np.asarray(center, dtype=float).reshape(-1)
        if c.shape != a.shape:
            raise InvalidInputError("center and semiaxes have different dimensions")
        self.semiaxes = a
        self.center = c
        self.dim = a.size
        self.volume = unit_ball_volume(self.dim) * float(np.prod(a))

    def __repr__(self):
        return f"Ellipsoid(semiaxes={self.semiaxes.tolist()}, center={self.center.tolist()})"

    @property
    def bounding_radius(self) -> float:
        return float(np.linalg.norm(self.center) + self.semiaxes.max())

    @property
    def is_ball(self) -> bool:
        return bool(np.all(self.semiaxes == self.semiaxes[0]))

    def _h0(self, u):
        return np.sqrt(np.sum((self.semiaxes * u) ** 2, axis=-1))

    def support(self, u):
        u = np.asarray(u, dtype=float)
        return u @ self.center + self._h0(u)

    def boundary_point(self, u):
        u = np.asarray(u, dtype=float)
        a2u = self.semiaxes ** 2 * u
        return self.center + a2u / self._h0(u)[..., None]

    def curvatures(self, u):
        u = normalize(u)
        if self.is_ball:
            r = self.semiaxes[0]
            shape = u.shape[:-1]
            return (np.full(shape + (self.dim - 1,), 1.0 / r),
                    np.full(shape, r ** (self.dim - 1)))
        a2 = self.semiaxes ** 2
        h = self._h0(u)
        T = tangent_basis(u)
        # Hessian of the support function restricted to u^perp: radii of curvature
        a2u = a2 * u
        TA = np.einsum("...ik,i->...ik", T, a2)
        H = np.einsum("...ik,...il->...kl", T, TA) / h[..., None, None]
        g = np.einsum("...ik,...i->...k", T, a2u)
        H = H - g[..., :, None] * g[..., None, :] / h[..., None, None] ** 3
        r = np.linalg.eigvalsh(H)
        kappa = 1.0 / r[..., ::-1]
        return kappa, np.prod(r, axis=-1)

    def level(self, points):
        """``sum(((x - c)/a)**2) - 1``: negative inside, zero on the boundary."""
        q = (np.asarray(points, dtype=float) - self.center) / self.semiaxes
        return np.sum(q * q, axis=-1) - 1.0

    def contains(self, points, tol: float = 0.0):
        return self.level(points) <= tol

    def chord(self, points, direction):
        p = (np.asarray(points, dtype=float) - self.center) / self.semiaxes
        d = np.asarray(direction, dtype=float) / self.semiaxes
        a = np.sum(d * d, axis=-1)
        b = np.sum(p * d, axis=-1)
        c = np.sum(p * p, axis=-1) - 1.0
        disc = b * b - a * c
        with np.errstate(invalid="ignore"):
            sq = np.sqrt(disc)
        # stable roots: avoid cancellation between b and sq
        q = -(b + np.copysign(sq, b))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = q / a
            r2 = c / q
        r2 = np.where(q == 0, r1, r2)
        lo = np.where(disc >= 0, np.minimum(r1, r2), np.nan)
        hi = np.where(disc >= 0, np.maximum(r1, r2), np.nan)
        return lo, hi

    def bounding_box(self):
        return self.center - self.semiaxes, self.center + self.semiaxes

    def scaled(self, a: float) -> "Ellipsoid":
        return Ellipsoid(a * self.semiaxes, a * self.center)

    def translated(self, x) -> "Ellipsoid":
        return Ellipsoid(self.semiaxes, self.center + np.asarray(x, dtype=float))


def make_ellipsoid(semiaxes, center=None) -> Ellipsoid:
    return Ellipsoid(semiaxes, center)


def make_ball(center, radius: float) -> Ellipsoid:
    """A Euclidean ball as a smooth body oracle."""
    c = np.asarray(center, dtype=float).reshape(-1)
    if not (float(radius) > 0):
        raise InvalidInputError(f"ball radius must be positive, got {radius}")
    return Ellipsoid(np.full(c.size, float(radius)), c)
