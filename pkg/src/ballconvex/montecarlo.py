"""Hit-or-miss Monte Carlo volume estimation."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .rng import MCConfig, map_blocks


def mc_volume(region, box, cfg: MCConfig, stream: int = 0):
    """Estimate ``vol(region)`` by uniform sampling of an axis-aligned box.

    Parameters
    ----------
    region : callable
        Vectorised membership predicate mapping ``(N, n)`` points to booleans.
        Must be contained in the box.
    box : pair of arrays
        Lower and upper corners.
    cfg : MCConfig

    Returns
    -------
    estimate, stderr : float
        Box volume times hit fraction, and the binomial standard error scaled
        by the box volume.
    """
    lo, hi = (np.asarray(b, dtype=float).reshape(-1) for b in box)
    if cfg.samples <= 0:
        raise InvalidInputError("zero samples")
    if np.any(hi < lo):
        raise InvalidInputError("empty sampling box")
    span = hi - lo
    vol_box = float(np.prod(span))
    if vol_box == 0.0:
        return 0.0, 0.0

    def hits(gen, size):
        pts = lo + span * gen.random((size, lo.size))
        return [np.count_nonzero(region(pts))]

    k = map_blocks(cfg, hits, stream)[0]
    n = cfg.samples
    p = k / n
    return vol_box * p, vol_box * float(np.sqrt(p * (1 - p) / n))
