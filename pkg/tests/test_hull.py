import numpy as np
import pytest

from ballconvex import (BallPolyhedron, HullInfeasibleError, hausdorff_distance, is_r_ball_convex,
                        make_ball, make_ellipsoid, min_curvature, r_ball_hull)
from ballconvex.quadrature import sphere_grid


def _inside(hull, pts, tol=1e-9):
    return hull.contains(pts, tol=tol)


@pytest.mark.parametrize("rho,R", [(1.0, 2.0), (1.0, 1.0), (0.5, 3.0)])
def test_hull_of_small_ball_is_the_ball(rho, R):
    K = make_ball([0.2, -0.1], rho)
    grid = sphere_grid(1, 128)
    H = r_ball_hull(K, R, grid)
    assert _inside(H, K.boundary_samples(256)).all()
    assert hausdorff_distance(K, H, sphere_grid(1, 1000)) < 2e-3 * rho


def test_hull_of_3d_ellipsoid_contains_it():
    K = make_ellipsoid([1.0, 1.1, 1.2])
    H = r_ball_hull(K, 3.0, sphere_grid(2, 10))
    assert _inside(H, K.boundary_samples(24)).all()
    assert hausdorff_distance(K, H, sphere_grid(2, 12)) < 0.05


def test_thin_ellipse_hull_strictly_contains_it():
    K = make_ellipsoid([0.9, 0.05])
    H = r_ball_hull(K, 1.0, sphere_grid(1, 128))
    assert _inside(H, K.boundary_samples(512)).all()
    # the spindle over the long axis reaches far above the ellipse
    top = H.support(np.array([[0.0, 1.0]]))[0]
    assert top > 0.5
    assert top == pytest.approx(1 - np.sqrt(1 - 0.9 ** 2), abs=0.03)


def test_degenerate_thin_ellipse_collapses_to_enclosing_ball():
    # for a = R the only R-ball containing the ellipse is the unit disk itself
    K = make_ellipsoid([1.0, 0.05])
    H = r_ball_hull(K, 1.0, sphere_grid(1, 64))
    assert _inside(H, K.boundary_samples(512)).all()
    assert H.support(np.array([[0.0, 1.0]]))[0] == pytest.approx(1.0, abs=1e-6)


def test_hull_infeasible_when_body_too_wide():
    with pytest.raises(HullInfeasibleError):
        r_ball_hull(make_ellipsoid([1.0, 0.05]), 0.9, sphere_grid(1, 32))


def test_ellipse_hull_slightly_inflated():
    K = make_ellipsoid([2.0, 1.0])
    H = r_ball_hull(K, 10.0, sphere_grid(1, 256))
    assert _inside(H, K.boundary_samples(512)).all()
    d = hausdorff_distance(K, H, sphere_grid(1, 720))
    assert 0 < d < 0.01


def test_hull_idempotent_and_monotone():
    K = make_ellipsoid([1.2, 1.0])
    grid = sphere_grid(1, 96)
    H = r_ball_hull(K, 3.0, grid)
    assert hausdorff_distance(H, r_ball_hull(H, 3.0, grid), grid) < 1e-9
    big = r_ball_hull(make_ellipsoid([1.3, 1.1]), 3.0, grid)
    assert _inside(big, H.boundary_samples(128)).all()


def test_hull_of_ball_polyhedron_is_itself():
    bp = BallPolyhedron(2.0, np.array([[0.3, 0.0], [-0.3, 0.0], [0.0, 0.4]]))
    grid = sphere_grid(1, 256)
    assert hausdorff_distance(bp, r_ball_hull(bp, 2.0, grid), sphere_grid(1, 512)) < 1e-3


def test_min_curvature_and_r_convexity():
    E = make_ellipsoid([2.0, 1.0])
    k, u = min_curvature(E)
    assert k == pytest.approx(0.25, rel=1e-12)
    assert abs(u[1]) == pytest.approx(1.0)
    assert is_r_ball_convex(E, 4.0)
    assert not is_r_ball_convex(E, 3.9)
    assert not is_r_ball_convex(make_ball([0, 0, 0], 1.0), 0.5)
    assert is_r_ball_convex(make_ball([0, 0, 0], 1.0), 1.0)


def test_hausdorff_distance_of_concentric_balls():
    g = sphere_grid(2, 8)
    assert hausdorff_distance(make_ball([0, 0, 0], 1.0), make_ball([0, 0, 0], 1.3), g) == pytest.approx(0.3)
