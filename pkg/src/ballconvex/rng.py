"""Counter-based random streams for reproducible Monte Carlo.

Samples are produced in fixed-size blocks.  Block ``b`` of stream ``s`` under
seed ``k`` is drawn from a Philox generator keyed by ``(k, s)`` whose counter
starts at ``b``, so the numbers never depend on how blocks are distributed
over workers.  Reductions are always performed in block order.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidInputError

BLOCK_SIZE = 1 << 16
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo settings.

    ``substreams`` only controls how many workers evaluate blocks in
    parallel; results are bit-identical for any value.
    """

    samples: int = 1_000_000
    seed: int = 0
    substreams: int = 1

    def __post_init__(self):
        if int(self.samples) <= 0:
            raise InvalidInputError(f"samples must be positive, got {self.samples}")
        if int(self.substreams) <= 0:
            raise InvalidInputError(f"substreams must be positive, got {self.substreams}")

    def with_samples(self, samples: int) -> "MCConfig":
        return MCConfig(samples=int(samples), seed=self.seed, substreams=self.substreams)


def block_generator(seed: int, stream: int, block: int) -> np.random.Generator:
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, 0, int(block) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def block_sizes(samples: int) -> list[int]:
    full, rest = divmod(int(samples), BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def map_blocks(cfg: MCConfig, fn: Callable[[np.random.Generator, int], np.ndarray],
               stream: int = 0) -> np.ndarray:
    """Evaluate ``fn(generator, size)`` on every block and sum the results.

    ``fn`` must return an array of partial sums (e.g. ``[hits]`` or
    ``[sum, sum_of_squares]``).  The sum is taken in block order.
    """
    sizes = block_sizes(cfg.samples)

    def run(b):
        return np.asarray(fn(block_generator(cfg.seed, stream, b), sizes[b]), dtype=float)

    if cfg.substreams > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=cfg.substreams) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(b) for b in range(len(sizes))]
    total = parts[0].copy()
    for p in parts[1:]:
        total += p
    return total


def uniform_directions(gen: np.random.Generator, size: int, dim: int) -> np.ndarray:
    """Uniform points on the unit sphere S^{dim-1}."""
    g = gen.standard_normal((size, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)
