"""Dense vector helpers and the seeded random source used by every other module.

All arithmetic is 64-bit; parameter vectors are flat 1-D float64 arrays.
"""
from __future__ import annotations

import numpy as np

from .exceptions import DimensionMismatchError, SamplingError


def as_param_vector(values) -> np.ndarray:
    """Coerce to a flat float64 array."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        arr = arr.ravel()
    return arr


def dot(a: np.ndarray, b: np.ndarray) -> float:
    """Inner product of two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dot: lengths {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def axpy(alpha: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Return y + alpha * x without modifying the inputs."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"axpy: lengths {x.shape} vs {y.shape}")
    return y + alpha * x


class RngState:
    """Deterministic random source: an identical seed yields an identical draw
    sequence on every platform.

    Backed by the counter-based Philox generator. Substreams are derived with
    :meth:`split`, so independent consumers (weight init, batch sampling, data
    splitting) never share a stream.
    """

    def __init__(self, seed: int, key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        self.position = 0
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.Philox(seq))

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, key={self.key}, position={self.position})"

    def split(self, *key: int) -> "RngState":
        """Child stream, independent of this one and of other keys."""
        return RngState(self.seed, self.key + key)

    def indices(self, population: int, count: int) -> np.ndarray:
        """Draw `count` distinct indices from [0, population)."""
        if count > population:
            raise SamplingError(f"cannot draw {count} distinct indices from {population}")
        self.position += 1
        if count == 0:
            return np.empty(0, dtype=np.intp)
        return self._gen.choice(population, size=count, replace=False).astype(np.intp)

    def permutation(self, n: int) -> np.ndarray:
        self.position += 1
        return self._gen.permutation(n).astype(np.intp)

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        self.position += 1
        return self._gen.uniform(low, high, size=size)

    def normal(self, size) -> np.ndarray:
        self.position += 1
        return self._gen.standard_normal(size=size)


def uniform_indices(rng: RngState, population: int, count: int) -> np.ndarray:
    """Draw `count` distinct indices uniformly from [0, population); advances rng."""
    return rng.indices(population, count)
