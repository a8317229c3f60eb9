"""Planar regions bounded by circular and elliptic arcs.

Unions and intersections of disks and ellipses have piecewise smooth
boundaries. Each smooth piece is integrated separately; corners carry no
boundary measure. This is enough to evaluate affine surface areas of the
four bodies ``K``, ``L``, ``K cup L`` and ``K cap L`` in the valuation identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidInputError, NotRBallConvexError
from .quadrature import gauss_legendre

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EllipseCurve:
    """Boundary of ``((x-cx)/a)^2 + ((y-cy)/b)^2 <= 1``, parametrised by angle t."""

    center: tuple
    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise InvalidInputError("semiaxes must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.stack([self.center[0] + self.a * np.cos(t),
                         self.center[1] + self.b * np.sin(t)], axis=-1)

    def speed(self, t):
        return np.hypot(self.a * np.sin(t), self.b * np.cos(t))

    def curvature(self, t):
        return self.a * self.b / self.speed(t) ** 3

    def level(self, p):
        p = np.asarray(p, dtype=float)
        return ((p[..., 0] - self.center[0]) / self.a) ** 2 \
            + ((p[..., 1] - self.center[1]) / self.b) ** 2 - 1.0


def circle(center, r: float) -> EllipseCurve:
    return EllipseCurve(tuple(center), r, r)


class PlanarRegion:
    """Intersection (``mode="cap"``) or union (``mode="cup"``) of convex primitives."""

    def __init__(self, primitives, mode: str = "cap", samples: int = 4096):
        if mode not in ("cap", "cup"):
            raise InvalidInputError("mode must be 'cap' or 'cup'")
        if not primitives:
            raise InvalidInputError("need at least one primitive")
        self.primitives = list(primitives)
        self.mode = mode
        self.samples = samples

    def contains(self, p) -> np.ndarray:
        inside = np.stack([c.level(p) <= 0 for c in self.primitives])
        return inside.all(axis=0) if self.mode == "cap" else inside.any(axis=0)

    def _keeps(self, i, p) -> bool:
        """Is a point of primitive i on the region's boundary?"""
        others = [c.level(p) for j, c in enumerate(self.primitives) if j != i]
        if not others:
            return True
        if self.mode == "cap":
            return all(v <= 0 for v in others)
        return all(v >= 0 for v in others)

    def _crossings(self, i):
        curve = self.primitives[i]
        ts = np.linspace(0.0, TWO_PI, self.samples + 1)
        roots = []
        for j, other in enumerate(self.primitives):
            if j == i:
                continue
            f = lambda t: float(other.level(curve.point(t)))
            v = other.level(curve.point(ts))
            idx = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
            roots.extend(brentq(f, ts[k], ts[k + 1], xtol=1e-15) for k in idx)
            roots.extend(ts[k] for k in np.flatnonzero(v[:-1] == 0))
        return sorted(roots)

    def pieces(self):
        """Boundary pieces ``(primitive_index, t0, t1)``."""
        out = []
        for i, curve in enumerate(self.primitives):
            cuts = self._crossings(i)
            if not cuts:
                if self._keeps(i, curve.point(0.0)):
                    out.append((i, 0.0, TWO_PI))
                continue
            ends = cuts + [cuts[0] + TWO_PI]
            for t0, t1 in zip(ends[:-1], ends[1:]):
                if t1 - t0 > 1e-14 and self._keeps(i, curve.point(0.5 * (t0 + t1))):
                    out.append((i, t0, t1))
        return out

    def _integrate(self, fn, nodes: int = 24):
        total = 0.0
        for i, t0, t1 in self.pieces():
            curve = self.primitives[i]
            k = max(1, math.ceil((t1 - t0) / (math.pi / 16)))
            edges = np.linspace(t0, t1, k + 1)
            for s0, s1 in zip(edges[:-1], edges[1:]):
                x, w = gauss_legendre(nodes, s0, s1)
                total += float(np.sum(w * fn(curve, x) * curve.speed(x)))
        return total

    def perimeter(self) -> float:
        return self._integrate(lambda c, t: np.ones_like(t))

    def area(self) -> float:
        """Green's theorem over the boundary pieces (all counterclockwise)."""
        def f(c, t):
            p = c.point(t)
            dx = -c.a * np.sin(t)
            dy = c.b * np.cos(t)
            return 0.5 * (p[:, 0] * dy - p[:, 1] * dx) / c.speed(t)
        return self._integrate(f)

    def affine_surface_area(self, R: float = math.inf) -> float:
        """Arcwise ``int (kappa - 1/R)^{1/3} ds``."""
        inv = 0.0 if math.isinf(R) else 1.0 / R

        def f(c, t):
            gap = c.curvature(t) - inv
            if np.any(gap < -1e-12):
                raise NotRBallConvexError(f"arc curvature {gap.min() + inv:.6g} below 1/R={inv:.6g}")
            return np.maximum(gap, 0.0) ** (1.0 / 3.0)

        return self._integrate(f)


def valuation_defect(K: PlanarRegion, L: PlanarRegion, union: PlanarRegion,
                     inter: PlanarRegion, R: float) -> dict:
    """``as(K cup L) + as(K cap L) - as(K) - as(L)`` and its parts."""
    vals = {name: body.affine_surface_area(R)
            for name, body in (("K", K), ("L", L), ("union", union), ("intersection", inter))}
    vals["defect"] = vals["union"] + vals["intersection"] - vals["K"] - vals["L"]
    return vals


def two_disk_configuration(rho: float, distance: float):
    """``K``, ``L``, ``K cup L``, ``K cap L`` for disks of radius rho at the given centre distance."""
    if not (0 < distance < 2 * rho):
        raise InvalidInputError("disks must overlap properly")
    a = circle((-distance / 2, 0.0), rho)
    b = circle((distance / 2, 0.0), rho)
    return (PlanarRegion([a]), PlanarRegion([b]),
            PlanarRegion([a, b], "cup"), PlanarRegion([a, b], "cap"))


def cut_ellipse_configuration(a: float, b: float, R: float, depth: float):
    """Ellipse with its two flat sides shaved by R-disks.

    ``K = E cap B1`` and ``L = E cap B2`` where B1, B2 cut caps of the given
    depth at the top and bottom of E. The cut regions are disjoint, so
    ``K cup L = E`` and ``K cap L = E cap B1 cap B2``; all four bodies are
    R-ball convex whenever E is.
    """
    E = EllipseCurve((0.0, 0.0), a, b)
    if E.curvature(math.pi / 2) < 1.0 / R - 1e-12:
        raise NotRBallConvexError("ellipse is not R-ball convex")
    if not (0 < depth < b):
        raise InvalidInputError("cut depth must lie in (0, b)")
    B1 = circle((0.0, b - depth - R), R)
    B2 = circle((0.0, -(b - depth - R)), R)
    return (PlanarRegion([E, B1]), PlanarRegion([E, B2]),
            PlanarRegion([E]), PlanarRegion([E, B1, B2]))
