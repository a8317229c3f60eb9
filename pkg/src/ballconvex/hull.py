"""R-ball convexity, R-ball hulls and support-function Hausdorff distance."""
from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree

from .ballpoly import BallPolyhedron, min_enclosing_ball, support_points
from .errors import HullInfeasibleError, InvalidInputError
from .geometry import normalize
from .quadrature import SphereGrid, sphere_grid

logger = logging.getLogger(__name__)


def _covering_gap(samples: np.ndarray, probe: np.ndarray) -> float:
    """Largest distance from a probe boundary point to the nearest sample."""
    d, _ = cKDTree(samples).query(probe)
    return float(d.max())


def r_ball_hull(body, R: float, dir_grid: SphereGrid, containment_resolution: int | None = None,
                tol: float = 1e-9) -> BallPolyhedron:
    """Discretised R-ball hull: one supporting R-ball per grid direction.

    For direction u the ball ``B(x_u, R)`` contains the body and minimises
    ``x_u . u + R``.  The internally tangent ball ``B(p(u) - R u, R)`` is used
    whenever it contains the boundary samples; otherwise x_u is the extreme
    point in direction -u of the set of admissible centres, which is itself
    the ball polyhedron of radius R around the boundary samples (shrunk by
    the sample covering gap so the true boundary stays inside).
    """
    if not (R > 0 and np.isfinite(R)):
        raise InvalidInputError(f"radius must be positive and finite, got {R}")
    if dir_grid.dim != body.dim - 1:
        raise InvalidInputError("direction grid does not match body dimension")
    U = dir_grid.nodes
    m = containment_resolution or max(4 * len(U) ** (1.0 / max(body.dim - 1, 1)), 256)
    m = int(m)
    samples = body.boundary_samples(m)
    probe = body.boundary_samples(2 * m + 1)
    gap = _covering_gap(samples, probe)

    P = body.boundary_point(U)
    X = P - R * U
    d2 = np.max(np.sum((samples[None, :, :] - X[:, None, :]) ** 2, axis=2), axis=1) \
        if len(samples) * len(U) < 1 << 24 else np.array(
            [np.max(np.sum((samples - x) ** 2, axis=1)) for x in X])
    bad = np.sqrt(d2) > R * (1 + tol)
    if np.any(bad):
        X[bad] = _admissible_extremes(samples, R, gap, -U[bad], tol)
    witness = getattr(body, "center", None)
    return BallPolyhedron(R, X, witness)


def _admissible_extremes(samples, R, gap, V, tol):
    """Extreme points in directions V of the admissible-centre set."""
    c, r = min_enclosing_ball(samples)
    if r > R * (1 + tol):
        raise HullInfeasibleError(
            f"no ball of radius {R} contains the body (enclosing radius {r:.6g})")
    for radius in (R - 1.5 * gap, R):
        if radius > r * (1 + 1e-9):
            if radius == R:
                logger.warning("hull: sample gap %.3g exceeds the radius slack; using unshrunk radius", gap)
            return support_points(samples, radius, V)
    # the admissible set degenerates to (nearly) a single point
    logger.warning("hull: enclosing radius %.12g ~ R; admissible centres collapse to a point", r)
    return np.broadcast_to(c, V.shape).copy()


def min_curvature(body, grid: SphereGrid | None = None, refine: bool = True):
    """Minimum principal curvature over the boundary and the normal where it occurs."""
    grid = grid or sphere_grid(body.dim - 1, 720 if body.dim == 2 else 48)
    kappa, _ = body.curvatures(grid.nodes)
    kmin = kappa[:, 0]
    i = int(np.argmin(kmin))
    best_u, best_k = grid.nodes[i], float(kmin[i])
    if refine:
        f = lambda z: float(body.curvatures(normalize(z))[0][0])
        res = minimize(f, best_u, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
        if res.fun < best_k:
            best_u, best_k = normalize(res.x), float(res.fun)
    return best_k, best_u


def is_r_ball_convex(body, R: float, tol: float = 1e-12, grid: SphereGrid | None = None) -> bool:
    """Smooth-body criterion: every principal curvature is at least 1/R - tol."""
    kmin, _ = min_curvature(body, grid)
    return kmin >= 1.0 / R - tol


def hausdorff_distance(A, B, dir_grid: SphereGrid) -> float:
    """``max_u |h_A(u) - h_B(u)|`` over the grid directions.

    Equals the Hausdorff distance of convex bodies in the limit of a dense
    grid.  Inputs need a vectorised ``support`` method.
    """
    U = dir_grid.nodes
    ha = np.asarray(A.support(U), dtype=float)
    hb = np.asarray(B.support(U), dtype=float)
    if not (np.all(np.isfinite(ha)) and np.all(np.isfinite(hb))):
        raise InvalidInputError("unbounded input to hausdorff_distance")
    return float(np.max(np.abs(ha - hb)))
