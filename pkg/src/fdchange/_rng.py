"""Deterministic replicate-indexed random streams.

All Monte Carlo loops in this package draw replicate ``r`` from a stream
derived from ``(seed, r)`` via the counter-based Philox generator, so results
are reproducible and independent of execution order or worker count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["replicate_rng", "resolve_seed"]


def replicate_rng(seed: int, index: int) -> np.random.Generator:
    """Return the generator for replicate ``index`` of a run keyed by ``seed``."""
    if index < 0:
        raise ValueError(f"replicate index must be >= 0, got {index}")
    return np.random.Generator(np.random.Philox(seed).jumped(index))


def resolve_seed(seed: int | None) -> int:
    """Return ``seed`` itself, or a fresh entropy-derived seed when ``None``."""
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return int(seed)
