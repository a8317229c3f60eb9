import math

import numpy as np
import pytest

from ballconvex import InvalidInputError, MCConfig
from ballconvex.montecarlo import mc_volume
from ballconvex.rng import BLOCK_SIZE, block_sizes, map_blocks, uniform_directions


def test_block_partition():
    assert block_sizes(BLOCK_SIZE * 2 + 5) == [BLOCK_SIZE, BLOCK_SIZE, 5]
    assert sum(block_sizes(1_000_000)) == 1_000_000


@pytest.mark.parametrize("workers", [1, 2, 3, 8])
def test_results_identical_across_substreams(workers):
    base = MCConfig(samples=300_001, seed=9)
    f = lambda g, n: [g.random(n).sum(), n]
    ref = map_blocks(base, f)
    got = map_blocks(MCConfig(samples=300_001, seed=9, substreams=workers), f)
    assert got.tobytes() == ref.tobytes()


def test_streams_and_seeds_differ():
    f = lambda g, n: [g.random(n).sum()]
    cfg = MCConfig(samples=1000, seed=1)
    assert map_blocks(cfg, f, stream=0)[0] != map_blocks(cfg, f, stream=1)[0]
    assert map_blocks(cfg, f)[0] != map_blocks(MCConfig(samples=1000, seed=2), f)[0]


def test_uniform_directions_are_unit_and_centred():
    from ballconvex.rng import block_generator
    v = uniform_directions(block_generator(0, 0, 0), 100_000, 3)
    np.testing.assert_allclose(np.linalg.norm(v, axis=1), 1)
    assert np.abs(v.mean(axis=0)).max() < 0.01


@pytest.mark.parametrize("kwargs", [{"samples": 0}, {"samples": -5}, {"substreams": 0}])
def test_invalid_config(kwargs):
    with pytest.raises(InvalidInputError):
        MCConfig(**kwargs)


def test_mc_volume_of_disk():
    est, se = mc_volume(lambda p: np.sum(p * p, axis=1) <= 1, ([-1, -1], [1, 1]), MCConfig(400_000, seed=3))
    assert abs(est - math.pi) < 4 * se
    assert se < 0.01


def test_mc_volume_degenerate_box():
    assert mc_volume(lambda p: np.ones(len(p), bool), ([0, 0], [0, 1]), MCConfig(10)) == (0.0, 0.0)
    with pytest.raises(InvalidInputError):
        mc_volume(lambda p: p, ([1, 1], [0, 0]), MCConfig(10))
