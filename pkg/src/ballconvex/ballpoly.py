"""Ball polyhedra: finite intersections of equal-radius balls."""
from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidInputError
from .geometry import normalize

_CHUNK = 1 << 21  # max entries of a (points x centers) distance block


def _chunks(npts: int, ncent: int):
    step = max(1, _CHUNK // max(ncent, 1))
    for s in range(0, npts, step):
        yield slice(s, min(npts, s + step))


def _sphere_intersection_max(C: np.ndarray, R: float, u: np.ndarray):
    """Maximiser of u.x over the intersection of the spheres |x - C_i| = R.

    Returns ``None`` when the spheres do not meet or the system is degenerate.
    """
    c1 = C[0]
    if len(C) == 1:
        return c1 + R * u
    D = C[1:] - c1
    b = 0.5 * np.sum(D * D, axis=1)
    G = D @ D.T
    try:
        coef = np.linalg.solve(G, b)
    except np.linalg.LinAlgError:
        return None
    if np.linalg.cond(G) > 1e12:
        return None
    q = D.T @ coef
    r2 = R * R - q @ q
    if r2 < 0:
        return None
    pu = u - D.T @ np.linalg.solve(G, D @ u)
    npu = np.linalg.norm(pu)
    if npu < 1e-14:
        return c1 + q
    return c1 + q + np.sqrt(r2) * pu / npu


def support_points(centers: np.ndarray, R: float, U: np.ndarray,
                   tol: float = 1e-12, max_iter: int = 500) -> np.ndarray:
    """Points of ``cap_j B(centers_j, R)`` maximising ``u.x`` for each row of U.

    Exact active-set (LP-type) iteration: start from the ball with the
    smallest support value, repeatedly add the most violated ball and
    re-optimise over subsets of the current basis plus that ball.  The
    objective decreases strictly, so the loop terminates.
    """
    C = np.asarray(centers, dtype=float)
    U = normalize(np.atleast_2d(U))
    n = C.shape[1]
    j0 = np.argmin(U @ C.T, axis=1)
    X = C[j0] + R * U
    viol = np.empty(len(U))
    for sl in _chunks(len(U), len(C)):
        d = np.linalg.norm(X[sl, None, :] - C[None, :, :], axis=2)
        viol[sl] = d.max(axis=1) - R
    for i in np.flatnonzero(viol > tol * R):
        u = U[i]
        basis = [int(j0[i])]
        x = X[i]
        for _ in range(max_iter):
            d = np.linalg.norm(x - C, axis=1) - R
            v = int(np.argmax(d))
            if d[v] <= tol * R:
                break
            pool = basis + [v]
            best, best_val, best_S = None, -np.inf, None
            for k in range(0, min(len(basis), n - 1) + 1):
                for sub in combinations(basis, k):
                    S = list(sub) + [v]
                    xs = _sphere_intersection_max(C[S], R, u)
                    if xs is None:
                        continue
                    if np.max(np.linalg.norm(xs - C[pool], axis=1)) > R * (1 + 1e-10):
                        continue
                    val = u @ xs
                    if val > best_val:
                        best, best_val, best_S = xs, val, S
            if best is None:
                raise InvalidInputError("ball polyhedron support iteration failed (empty intersection?)")
            x, basis = best, best_S
        X[i] = x
    return X


def _meb_center(C: np.ndarray, iters: int = 2000) -> np.ndarray:
    """Approximate minimal enclosing ball centre (Badoiu-Clarkson)."""
    x = C.mean(axis=0)
    for k in range(1, iters + 1):
        far = C[np.argmax(np.sum((C - x) ** 2, axis=1))]
        x = x + (far - x) / (k + 1)
    return x


def min_enclosing_ball(points: np.ndarray):
    """Centre and radius of the smallest ball containing ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    x0 = _meb_center(P, 500)
    r0 = np.max(np.sum((P - x0) ** 2, axis=1))
    n = P.shape[1]
    z0 = np.concatenate([x0, [r0]])
    cons = {
        "type": "ineq",
        "fun": lambda z: z[n] - np.sum((P - z[:n]) ** 2, axis=1),
        "jac": lambda z: np.hstack([2 * (P - z[:n]), np.ones((len(P), 1))]),
    }
    res = minimize(lambda z: z[n], z0, jac=lambda z: np.eye(n + 1)[n], constraints=[cons],
                   method="SLSQP", options={"ftol": 1e-15, "maxiter": 500})
    x = res.x[:n] if res.success else x0
    return x, float(np.sqrt(np.max(np.sum((P - x) ** 2, axis=1))))


class BallPolyhedron:
    """Intersection of the balls ``B(c_j, radius)``.

    A witness point inside every ball is stored at construction; it is the
    origin for radial functions.
    """

    def __init__(self, radius: float, centers, witness=None):
        C = np.atleast_2d(np.asarray(centers, dtype=float))
        if C.size == 0:
            raise InvalidInputError("ball polyhedron needs at least one center")
        if not (float(radius) > 0):
            raise InvalidInputError(f"radius must be positive, got {radius}")
        self.radius = float(radius)
        self.centers = C
        self.dim = C.shape[1]
        cands = [] if witness is None else [np.asarray(witness, dtype=float).reshape(-1)]
        cands += [C.mean(axis=0), _meb_center(C)]
        if len(C) > 1:
            cands.append(min_enclosing_ball(C)[0])
        for w in cands:
            if np.max(np.linalg.norm(C - w, axis=1)) < self.radius:
                self.witness = w
                break
        else:
            raise InvalidInputError("ball polyhedron has empty interior (no witness found)")

    def __repr__(self):
        return f"BallPolyhedron(radius={self.radius}, n_balls={len(self.centers)}, dim={self.dim})"

    @property
    def center(self) -> np.ndarray:
        return self.witness

    @property
    def volume(self):
        return None

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        P = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(len(P), dtype=bool)
        lim = (self.radius * (1 + tol)) ** 2
        c2 = np.sum(self.centers ** 2, axis=1)
        for sl in _chunks(len(P), len(self.centers)):
            # |p - c|^2 = |p|^2 - 2 p.c + |c|^2; the worst ball decides
            d2 = c2 - 2.0 * (P[sl] @ self.centers.T)
            out[sl] = np.max(d2, axis=1) + np.sum(P[sl] ** 2, axis=1) <= lim
        return out.reshape(np.shape(points)[:-1])

    def support_point(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        X = support_points(self.centers, self.radius, u.reshape(-1, self.dim))
        return X.reshape(u.shape)

    boundary_point = support_point

    def support(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        X = self.support_point(u)
        return np.sum(X * u, axis=-1)

    def radial(self, v, origin=None) -> np.ndarray:
        """Exact distance from ``origin`` (default: witness) to the boundary along ``v``."""
        o = self.witness if origin is None else np.asarray(origin, dtype=float)
        V = np.atleast_2d(np.asarray(v, dtype=float))
        P = o - self.centers
        c = np.sum(P * P, axis=1) - self.radius ** 2
        if np.any(c >= 0):
            raise InvalidInputError("radial origin is not interior to the ball polyhedron")
        out = np.empty(len(V))
        for sl in _chunks(len(V), len(self.centers)):
            b = V[sl] @ P.T
            a = np.sum(V[sl] ** 2, axis=1)[:, None]
            s = (-b + np.sqrt(b * b - a * c)) / a
            out[sl] = s.min(axis=1)
        return out.reshape(np.shape(v)[:-1])

    def chord(self, points, direction):
        P = np.atleast_2d(np.asarray(points, dtype=float))
        Dd = np.broadcast_to(np.asarray(direction, dtype=float), P.shape)
        lo = np.full(len(P), -np.inf)
        hi = np.full(len(P), np.inf)
        a = np.sum(Dd * Dd, axis=1)
        for c in self.centers:
            p = P - c
            b = np.sum(p * Dd, axis=1)
            cc = np.sum(p * p, axis=1) - self.radius ** 2
            disc = b * b - a * cc
            with np.errstate(invalid="ignore"):
                sq = np.sqrt(disc)
            lo = np.maximum(lo, np.where(disc >= 0, (-b - sq) / a, np.inf))
            hi = np.minimum(hi, np.where(disc >= 0, (-b + sq) / a, -np.inf))
        miss = lo > hi
        lo[miss] = np.nan
        hi[miss] = np.nan
        shape = np.shape(points)[:-1]
        return lo.reshape(shape), hi.reshape(shape)

    def boundary_samples(self, resolution: int) -> np.ndarray:
        from .quadrature import sphere_grid

        g = sphere_grid(self.dim - 1, resolution)
        nodes = np.concatenate([g.nodes, sphere_grid(self.dim - 1, resolution, offset=0.5).nodes])
        return self.witness + self.radial(nodes)[:, None] * nodes

    def bounding_box(self):
        e = np.eye(self.dim)
        return -self.support(-e), self.support(e)

    @property
    def bounding_radius(self) -> float:
        lo, hi = self.bounding_box()
        return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))

    def scaled(self, a: float) -> "BallPolyhedron":
        return BallPolyhedron(a * self.radius, a * self.centers, a * self.witness)

    def translated(self, x) -> "BallPolyhedron":
        x = np.asarray(x, dtype=float)
        return BallPolyhedron(self.radius, self.centers + x, self.witness + x)

    def volume_quadrature(self, grid) -> float:
        """``(1/n) int rho^n dsigma`` about the witness on a sphere grid."""
        rho = self.radial(grid.nodes)
        return float(np.sum(grid.weights * rho ** self.dim) / self.dim)

    def to_dict(self) -> dict:
        return {"type": "ball-polyhedron", "radius": self.radius,
                "centers": self.centers.tolist()}


def ball_poly_membership(bp: BallPolyhedron, p) -> bool:
    """True iff ``|p - c_j| <= R`` for every center."""
    p = np.asarray(p, dtype=float)
    return bool(np.all(np.sum((bp.centers - p) ** 2, axis=1) <= bp.radius ** 2))
