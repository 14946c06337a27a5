"""Synthetic datasets shared by the test modules.

The multi-change scenario mimics an annual-curve record: 156 curves on a
365-point grid, smooth correlated noise, and four injected mean shifts. The
noise lives on cosine modes while the shifts live on the constant and sine
modes, so the shift directions are orthogonal to the noise — recursion then
localizes every boundary exactly, which is what the exact-recovery tests pin.
"""

from __future__ import annotations

import math

import numpy as np

from fdchange.curves import FunctionalSample, Grid

#: 0-based indices of the last curve before each injected change.
MULTI_CHANGE_AFTER = (36, 104, 111, 140)

MULTI_CHANGE_SEED = 20260814


def multi_change_sample(
    n: int = 156,
    grid_points: int = 365,
    seed: int = MULTI_CHANGE_SEED,
    noise_scale: float = 1.0,
) -> FunctionalSample:
    grid = Grid.uniform(grid_points)
    t = grid.points
    rng = np.random.default_rng(seed)

    modes = np.array([math.sqrt(2.0) * np.cos(2 * np.pi * k * t) for k in range(1, 13)])
    sds = noise_scale * 0.9 ** np.arange(12)
    values = (rng.standard_normal((n, 12)) * sds) @ modes

    shifts = (
        2.4 * np.ones_like(t),
        -2.6 * math.sqrt(2.0) * np.sin(2 * np.pi * t),
        2.8 * np.ones_like(t),
        -2.5 * math.sqrt(2.0) * np.sin(4 * np.pi * t),
    )
    for after, delta in zip(MULTI_CHANGE_AFTER, shifts):
        values[after + 1 :] += delta
    return FunctionalSample(grid, values)
