import math

import pytest

from ballconvex import NotRBallConvexError
from ballconvex.valuation import (PlanarRegion, circle, cut_ellipse_configuration,
                                  two_disk_configuration, valuation_defect)

LENS_UNIT_AT_1 = 2 * math.pi / 3 - math.sqrt(3) / 2


def test_two_disk_decomposition_areas():
    K, L, union, inter = two_disk_configuration(1.0, 1.0)
    assert inter.area() == pytest.approx(LENS_UNIT_AT_1, rel=1e-13)
    assert union.area() == pytest.approx(2 * math.pi - LENS_UNIT_AT_1, rel=1e-13)
    assert len(inter.pieces()) == 2 and len(union.pieces()) == 2
    assert inter.perimeter() + union.perimeter() == pytest.approx(4 * math.pi, rel=1e-13)


@pytest.mark.parametrize("distance", [0.2, 0.6, 1.5])
def test_valuation_identity_two_disks(distance):
    v = valuation_defect(*two_disk_configuration(0.8, distance), R=2.0)
    assert abs(v["defect"]) < 1e-10


def test_valuation_identity_r_convex_bodies():
    cfg = cut_ellipse_configuration(1.2, 1.0, 3.0, 0.1)
    v = valuation_defect(*cfg, R=3.0)
    assert abs(v["defect"]) < 1e-10
    # all four bodies are proper: cutting lowers the affine surface area
    assert v["intersection"] < v["K"] < v["union"]
    K = cfg[0]
    assert K.area() < 1.2 * math.pi


def test_single_primitive_matches_closed_form():
    disk = PlanarRegion([circle((0.3, 0.1), 1.0)])
    assert disk.affine_surface_area(2.0) == pytest.approx(2 * math.pi * 0.5 ** (1 / 3), rel=1e-13)
    with pytest.raises(NotRBallConvexError):
        disk.affine_surface_area(0.5)
