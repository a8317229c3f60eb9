import math

import numpy as np
import pytest

from ballconvex import (Ball, EmptyBodyError, FloatParams, InfeasibleCutError, InvalidInputError,
                        MCConfig, NotRBallConvexError, convolution_body, cross_variogram, cut_volume,
                        exact_cut_ball, floating_body, make_ball, make_ellipsoid,
                        radial_volume_difference, scaling_covariance_check, volume_deficit)
from ballconvex.floating import recertify
from ballconvex.quadrature import sphere_grid

# Unit disk cut by radius-2 balls on the normal line: the cut area is
# pi - lens(1, 2, 1 + t), solved for t by scalar root finding (offline oracle).
LENS_T = {1e-2: 0.02434205284994341, 1e-3: 0.005209683285920149, 1e-5: 0.00024139273786924695}
LENS_DEFICIT_1E3 = 0.03264814013945006
LENS_UNIT_AT_1 = 2 * math.pi / 3 - math.sqrt(3) / 2
# ellipse (2,1), R = 4, delta = 0.01; cross-checked by local-box Monte Carlo at 1e7 samples
ELLIPSE_T = {(0.0, 1.0): 0.006315282288242851, (1.0, 0.0): 0.03673494185561709}


def test_cross_variogram_examples(disk):
    mc = MCConfig(400_000, seed=1)
    unit = Ball(np.zeros(2), 1.0)
    est = cross_variogram(disk, unit, np.zeros(2), mc)
    assert abs(est.value - math.pi) <= 3 * est.stderr
    assert cross_variogram(disk, unit, np.array([2.0, 0.0]), mc).value == pytest.approx(0.0, abs=1e-12)
    assert cross_variogram(disk, unit, np.array([3.0, 0.0]), mc) == (0.0, 0.0)
    est = cross_variogram(disk, unit, np.array([1.0, 0.0]), mc)
    assert abs(est.value - LENS_UNIT_AT_1) <= 3 * est.stderr


def test_cut_volume_examples(disk):
    assert cut_volume(disk, Ball(np.zeros(2), 2.0)).value == 0.0
    assert cut_volume(disk, Ball(np.array([3.0, 0.0]), 1.0), mc=MCConfig(10_000)).value == pytest.approx(math.pi)
    est = cut_volume(disk, Ball(np.array([1.0, 0.0]), 1.0), mc=MCConfig(400_000, seed=2))
    assert abs(est.value - (math.pi - LENS_UNIT_AT_1)) <= 3 * est.stderr
    # the deterministic cap quadrature resolves even this large cap to 1e-3
    assert cut_volume(disk, Ball(np.array([1.0, 0.0]), 1.0)).value == pytest.approx(
        math.pi - LENS_UNIT_AT_1, rel=1e-3)


@pytest.mark.parametrize("delta", sorted(LENS_T))
def test_exact_cut_matches_lens_oracle(disk, delta):
    p = FloatParams(R=2.0, delta=delta)
    for u in ([1.0, 0.0], [0.6, -0.8]):
        cb = exact_cut_ball(disk, u, p)
        assert cb.depth == pytest.approx(LENS_T[delta], rel=1e-9)
        assert abs(cb.cut_volume - delta) <= p.bisect_tol * delta
        np.testing.assert_allclose(cb.ball.center, -(1 + cb.depth) * np.asarray(u), atol=1e-12)


def test_exact_cut_tends_to_tangent_ball(disk):
    cb = exact_cut_ball(disk, [0.0, 1.0], FloatParams(R=2.0, delta=1e-12))
    assert cb.depth < 1e-7
    assert exact_cut_ball(disk, [0.0, 1.0], FloatParams(R=2.0, delta=0.0)).depth == 0.0


def test_exact_cut_on_ellipse_regression(ellipse21):
    p = FloatParams(R=4.0, delta=0.01)
    t = {u: exact_cut_ball(ellipse21, u, p).depth for u in ELLIPSE_T}
    for u, ref in ELLIPSE_T.items():
        assert t[u] == pytest.approx(ref, rel=1e-8)
    assert t[(0.0, 1.0)] < t[(1.0, 0.0)]


def test_exact_cut_in_3d_matches_volume_by_quadrature():
    K = make_ellipsoid([1.0, 1.2, 1.5])
    p = FloatParams(R=4.0, delta=1e-3, xi_resolution=32)
    cb = exact_cut_ball(K, [0.3, -0.4, np.sqrt(0.75)], p)
    fine = cut_volume(K, cb.ball, axis=cb.direction, xi_resolution=128, radial_nodes=64).value
    assert fine == pytest.approx(1e-3, rel=1e-6)


def test_preconditions(ellipse21, disk):
    with pytest.raises(NotRBallConvexError):
        exact_cut_ball(ellipse21, [0.0, 1.0], FloatParams(R=3.0, delta=0.01))
    with pytest.raises(InfeasibleCutError):
        exact_cut_ball(disk, [0.0, 1.0], FloatParams(R=2.0, delta=2.0))
    with pytest.raises(InvalidInputError):
        FloatParams(R=2.0, delta=-1.0)
    with pytest.raises(InvalidInputError):
        FloatParams(R=2.0, delta=1e-3, bisect_tol=0.1)


def test_floating_body_of_disk_is_concentric_disk(disk):
    fb = floating_body(disk, FloatParams(R=2.0, delta=0.01, dir_resolution=128))
    rho = 1 - LENS_T[1e-2]
    s = fb.support(sphere_grid(1, 128).nodes)
    assert np.max(np.abs(s - rho)) < 1e-3
    assert np.linalg.norm(fb.support_point(sphere_grid(1, 64).nodes).mean(axis=0)) < 1e-3
    assert len(fb.certificate()) == 128


def test_floating_body_at_zero_delta_is_grid_hull(disk):
    fb = floating_body(disk, FloatParams(R=2.0, delta=0.0, dir_resolution=128))
    assert np.max(np.abs(fb.support(sphere_grid(1, 128).nodes) - 1)) < 1e-12
    assert np.all(fb.depths == 0)


def test_certificate_recertifies(ellipse21):
    p = FloatParams(R=5.0, delta=1e-3, dir_resolution=64)
    fb = floating_body(ellipse21, p)
    assert recertify(ellipse21, fb, p).max() <= p.bisect_tol


def test_nesting_and_containment(ellipse21):
    deltas = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
    grid = sphere_grid(1, 128)
    bodies = [floating_body(ellipse21, FloatParams(R=5.0, delta=d), grid) for d in deltas]
    pts = np.random.default_rng(0).uniform(-2, 2, (50_000, 2))
    pts = pts[ellipse21.contains(pts)]
    for small, big in zip(bodies, bodies[1:]):
        assert not np.any(small.contains(pts) & ~big.contains(pts, tol=1e-9))
    for b in bodies:
        assert ellipse21.contains(b.boundary_samples(128), tol=1e-9).all()
    fine = sphere_grid(1, 2048)
    deficits = [radial_volume_difference(ellipse21, b, fine) for b in bodies]
    assert np.all(np.diff(deficits) < 0)


def test_volume_deficit_matches_lens_oracle(disk):
    p = FloatParams(R=2.0, delta=1e-3, dir_resolution=256, mc=MCConfig(500_000, seed=4))
    est = volume_deficit(disk, p)
    assert abs(est.value - LENS_DEFICIT_1E3) <= 3 * est.stderr
    polar = volume_deficit(disk, p, method="polar")
    # the polar estimator resolves the bulges between cutting balls, which
    # only shrink the deficit of the discretised body
    assert LENS_DEFICIT_1E3 * (1 - 5e-3) < polar.value < LENS_DEFICIT_1E3
    assert polar.stderr < est.stderr / 100


def test_volume_deficit_at_zero_delta(disk):
    p = FloatParams(R=2.0, delta=0.0, dir_resolution=256, mc=MCConfig(200_000, seed=4))
    est = volume_deficit(disk, p)
    assert abs(est.value) <= 3 * est.stderr + 1e-3
    assert abs(volume_deficit(disk, p, method="polar").value) < 1e-3


def test_radial_volume_difference_examples(disk):
    g = sphere_grid(1, 256)
    assert radial_volume_difference(disk, disk, g) == pytest.approx(0.0, abs=1e-14)
    assert radial_volume_difference(disk, make_ball([0, 0], 0.5), g) == pytest.approx(0.75 * math.pi, abs=1e-6)
    ball = make_ball([0, 0, 0], 1.0)
    assert radial_volume_difference(ball, make_ball([0, 0, 0], 0.5), sphere_grid(2, 12)) == pytest.approx(
        7 / 8 * 4 * math.pi / 3, rel=1e-10)
    with pytest.raises(InvalidInputError):
        radial_volume_difference(disk, make_ball([3, 0], 0.5), g)


class _MembershipOnly:
    def __init__(self, r):
        self.r = r

    def contains(self, p):
        return np.sum(np.asarray(p) ** 2, axis=-1) <= self.r ** 2


def test_radial_volume_difference_by_bisection(disk):
    v = radial_volume_difference(disk, _MembershipOnly(0.5), sphere_grid(1, 64))
    assert v == pytest.approx(0.75 * math.pi, abs=1e-6)


def test_cross_estimators_agree(disk):
    p = FloatParams(R=2.0, delta=1e-3, dir_resolution=64, mc=MCConfig(200_000, seed=8))
    fb = floating_body(disk, p)
    rad = radial_volume_difference(disk, fb, sphere_grid(1, 4096))
    hit = volume_deficit(disk, p, fb)
    pol = volume_deficit(disk, p, fb, method="polar")
    assert abs(hit.value - rad) <= 3 * hit.stderr
    assert abs(pol.value - rad) <= 3 * pol.stderr + 1e-6


def test_convolution_body_examples(disk):
    mc = MCConfig(100_000, seed=5)
    grid, s = convolution_body(disk, LENS_UNIT_AT_1, mc, 8)
    np.testing.assert_allclose(s, 0.5, atol=5e-3)
    grid, s = convolution_body(disk, math.pi, mc, 4)
    assert np.all(s < 1e-2)
    with pytest.raises(EmptyBodyError):
        convolution_body(disk, 4.0, mc, 4)


def test_convolution_body_is_even_for_symmetric_body(ellipse21):
    grid, s = convolution_body(ellipse21, 3.0, MCConfig(50_000, seed=6), 8)
    half = len(s) // 2
    np.testing.assert_allclose(s[:half], s[half:], atol=1e-2)


def test_scaling_covariance(disk):
    p = FloatParams(R=2.0, delta=1e-3, dir_resolution=64, mc=MCConfig(100_000))
    same = scaling_covariance_check(disk, 1.0, p)
    assert same["hausdorff"] < 1e-12
    rep = scaling_covariance_check(disk, 2.0, p)
    assert rep["hausdorff"] <= 3 * rep["depth_tolerance"]
    assert abs(rep["volume_left"] - rep["volume_right"]) <= 3 * rep["volume_stderr"] + 1e-12
    rep = scaling_covariance_check(make_ellipsoid([1.2, 1.0]), 0.7, FloatParams(R=3.0, delta=1e-3, dir_resolution=64,
                                                                              mc=MCConfig(100_000)))
    assert rep["hausdorff"] <= 3 * rep["depth_tolerance"]
