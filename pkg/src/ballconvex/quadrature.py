"""Product quadrature on spheres and boundary integrals of smooth bodies."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import InvalidInputError, NumericDomainError
from .geometry import sphere_measure


@dataclass(frozen=True)
class SphereGrid:
    """Nodes on S^dim (embedded in R^{dim+1}) with positive weights."""

    dim: int
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    @property
    def total(self) -> float:
        return float(self.weights.sum())


@lru_cache(maxsize=64)
def _gauss_legendre(m: int):
    x, w = np.polynomial.legendre.leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(m: int, a: float = -1.0, b: float = 1.0):
    """Nodes and weights of the m-point Gauss-Legendre rule on [a, b]."""
    x, w = _gauss_legendre(int(m))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@lru_cache(maxsize=None)
def _gauss_jacobi(m: int, alpha: float):
    x, w = roots_jacobi(m, alpha, alpha)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def sphere_grid(sphere_dim: int, resolution: int, offset: float = 0.0) -> SphereGrid:
    """Quadrature grid on S^sphere_dim.

    * S^0: the two points +1 and -1 with weight 1.
    * S^1: ``resolution`` equispaced angles, equal weights.
    * S^d, d >= 2: polar angles phi_1..phi_{d-1} in [0, pi] and the azimuth
      at ``2*resolution`` equispaced nodes.  Coordinates are x_1 = cos phi_1,
      x_k = sin phi_1 ... sin phi_{k-1} cos phi_k, and the last two use the
      azimuth.  The Jacobian prod_k sin(phi_k)^(d-k) is absorbed by placing
      cos(phi_k) at Gauss-Jacobi nodes (``resolution`` each), so the grid
      integrates polynomials of degree below ``2*resolution`` exactly.

    ``offset`` rotates the azimuth by that fraction of one angular step, which
    gives a staggered grid for refinement checks.
    """
    d = int(sphere_dim)
    m = int(resolution)
    if d < 0 or m < 1:
        raise InvalidInputError(f"need sphere_dim >= 0 and resolution >= 1, got {d}, {m}")
    if d == 0:
        return SphereGrid(0, np.array([[1.0], [-1.0]]), np.array([1.0, 1.0]))
    if d == 1:
        t = 2 * np.pi * (np.arange(m) + offset) / m
        nodes = np.stack([np.cos(t), np.sin(t)], axis=1)
        return SphereGrid(1, nodes, np.full(m, 2 * np.pi / m))

    # polar angle k carries the Jacobian sin^(d-1-k); in x = cos(phi) this is
    # the Gauss-Jacobi weight (1 - x^2)^((d-2-k)/2), exact to degree 2m - 1
    polar = [_gauss_jacobi(m, 0.5 * (d - 2 - k)) for k in range(d - 1)]
    naz = 2 * m
    az = 2 * np.pi * (np.arange(naz) + offset) / naz
    waz = np.full(naz, 2 * np.pi / naz)
    grids = np.meshgrid(*([np.arccos(x) for x, _ in polar] + [az]), indexing="ij")
    wgrids = np.meshgrid(*([w for _, w in polar] + [waz]), indexing="ij")
    angles = [g.reshape(-1) for g in grids]
    w = np.ones_like(angles[0])
    for wg in wgrids:
        w = w * wg.reshape(-1)
    coords = []
    sprod = np.ones_like(angles[0])
    for k in range(d - 1):
        coords.append(sprod * np.cos(angles[k]))
        sprod = sprod * np.sin(angles[k])
    coords.append(sprod * np.cos(angles[-1]))
    coords.append(sprod * np.sin(angles[-1]))
    nodes = np.stack(coords, axis=1)
    return SphereGrid(d, nodes, w)


def check_grid(grid: SphereGrid, rtol: float = 1e-8) -> None:
    total = sphere_measure(grid.dim)
    if abs(grid.total - total) > rtol * total:
        raise InvalidInputError(f"grid weights sum to {grid.total}, expected {total}")


def surface_integral(body, integrand, grid: SphereGrid) -> float:
    """Integrate over the boundary of a smooth strictly convex body.

    The boundary integral is transported to the sphere of normals:
    ``int_{dK} F dmu = int_{S^{n-1}} F(x(u), u, kappa(u)) f_K(u) dsigma(u)``
    with f_K the reciprocal Gauss curvature.  ``integrand`` receives batched
    boundary points, normals and curvature arrays and returns values per node.
    """
    if grid.dim != body.dim - 1:
        raise InvalidInputError(f"grid on S^{grid.dim} does not match a body in R^{body.dim}")
    u = grid.nodes
    kappa, fk = body.curvatures(u)
    bad = ~(np.all(np.isfinite(kappa), axis=-1) & np.isfinite(fk))
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise NumericDomainError(f"curvature undefined at grid node {i}: u={u[i].tolist()}")
    x = body.boundary_point(u)
    vals = np.asarray(integrand(x, u, kappa), dtype=float)
    vals = np.broadcast_to(vals, fk.shape)
    return float(np.sum(grid.weights * vals * fk))
