"""Batch samplers.

The overlap sampler draws a fresh random batch every iteration while forcing
consecutive batches to share exactly round(o * r) indices, where r is the
batch size and o the configured overlap ratio. The shared indices are chosen
uniformly from the previous batch; the rest are drawn uniformly, without
replacement, from outside the previous batch, so the realized intersection
is exact rather than approximate.
"""
from __future__ import annotations

import math

import numpy as np

from .exceptions import ConfigError
from .numeric import RngState


def round_half_up(x: float) -> int:
    """round() with the .5 tie always going up, independent of parity."""
    return int(math.floor(x + 0.5))


def overlap_of(prev, curr) -> np.ndarray:
    """Sorted intersection of two index sets."""
    return np.intersect1d(np.asarray(prev, dtype=np.intp), np.asarray(curr, dtype=np.intp))


class OverlapSampler:
    """Stateful sampler producing batches with a fixed pairwise overlap.

    One sampler per training run; it owns its RngState. When the batch size
    equals the dataset size every batch is the full index range and the
    overlap setting is moot.
    """

    def __init__(self, dataset_size: int, batch_size: int, overlap: float, rng: RngState):
        if batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {batch_size}")
        if batch_size > dataset_size:
            raise ConfigError(
                f"batch_size {batch_size} exceeds dataset size {dataset_size}"
            )
        if not 0.0 <= overlap <= 1.0:
            raise ConfigError(f"overlap ratio must be in [0, 1], got {overlap}")
        n_shared = round_half_up(overlap * batch_size)
        if n_shared > batch_size:
            raise ConfigError(
                f"overlap count {n_shared} exceeds batch size {batch_size}"
            )
        if batch_size < dataset_size and dataset_size - batch_size < batch_size - n_shared:
            raise ConfigError(
                f"dataset size {dataset_size} too small to refill batches of "
                f"{batch_size} with overlap {overlap} (needs {2 * batch_size - n_shared})"
            )
        self.dataset_size = dataset_size
        self.batch_size = batch_size
        self.overlap = overlap
        self.n_shared = n_shared
        self.rng = rng
        self.previous_batch: np.ndarray | None = None

    def next_batch(self) -> np.ndarray:
        """Next batch of `batch_size` distinct indices, sorted.

        The first call draws uniformly with no overlap constraint; later
        calls share exactly `n_shared` indices with the previous batch.
        """
        n, r = self.dataset_size, self.batch_size
        if r == n:
            batch = np.arange(n, dtype=np.intp)
        elif self.previous_batch is None:
            batch = np.sort(self.rng.indices(n, r))
        else:
            prev = self.previous_batch
            keep = prev[self.rng.indices(len(prev), self.n_shared)]
            outside = np.setdiff1d(np.arange(n, dtype=np.intp), prev, assume_unique=True)
            fresh = outside[self.rng.indices(len(outside), r - self.n_shared)]
            batch = np.sort(np.concatenate([keep, fresh]))
        self.previous_batch = batch
        return batch.copy()


class UniformSampler:
    """Independent uniform batches, no overlap bookkeeping (Adam's sampler)."""

    def __init__(self, dataset_size: int, batch_size: int, rng: RngState):
        if batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {batch_size}")
        if batch_size > dataset_size:
            raise ConfigError(
                f"batch_size {batch_size} exceeds dataset size {dataset_size}"
            )
        self.dataset_size = dataset_size
        self.batch_size = batch_size
        self.rng = rng

    def next_batch(self) -> np.ndarray:
        return np.sort(self.rng.indices(self.dataset_size, self.batch_size))
