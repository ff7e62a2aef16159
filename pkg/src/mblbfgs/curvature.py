"""Curvature-pair storage with adaptive capacity and early-phase resetting.

A curvature pair is a parameter displacement s together with the matching
gradient difference t; the pair contributes rho = 1/(t.s) to the implicit
inverse-Hessian approximation. The store keeps at most m_k pairs, oldest
first. Two policies adjust how much second-order information is trusted:

* adaptive capacity: m_k is multiplied by a growth factor (capped at m_max)
  whenever the recent validation-loss improvements are strictly shrinking,
  the signal that training is entering a locally quadratic region;
* resetting: while m_k is still at or below m_reset, filling the store
  discards everything instead of evicting one pair, so stale early-phase
  curvature never lingers.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import ConfigError
from .numeric import dot
from .sampling import round_half_up


@dataclass
class CurvaturePair:
    """One (s, t) displacement / gradient-difference pair with rho = 1/(t.s)."""

    s: np.ndarray
    t: np.ndarray
    rho: float

    @classmethod
    def from_vectors(cls, s: np.ndarray, t: np.ndarray) -> "CurvaturePair":
        ts = dot(t, s)
        if not np.isfinite(ts) or ts <= 0.0:
            raise ValueError(f"curvature pair requires t.s > 0, got {ts}")
        return cls(s=np.asarray(s, dtype=np.float64), t=np.asarray(t, dtype=np.float64), rho=1.0 / ts)


class AdmitOutcome(Enum):
    APPEND = "append"
    EVICT = "evict"
    RESET = "reset"


@dataclass
class CurvatureStore:
    """Bounded deque of curvature pairs, oldest first, capacity m_k."""

    m_init: int
    m_max: int
    m_reset: int
    growth_factor: float
    m_k: int = field(init=False)
    pairs: deque = field(init=False)

    def __post_init__(self):
        if self.m_init < 1:
            raise ConfigError(f"initial memory must be >= 1, got {self.m_init}")
        if self.m_init > self.m_max:
            raise ConfigError(f"initial memory {self.m_init} exceeds m_max {self.m_max}")
        if self.m_reset < 0:
            raise ConfigError(f"m_reset must be >= 0, got {self.m_reset}")
        if self.growth_factor < 1.0:
            raise ConfigError(f"growth factor must be >= 1, got {self.growth_factor}")
        self.m_k = self.m_init
        self.pairs = deque()

    @property
    def q_k(self) -> int:
        """Number of currently stored pairs."""
        return len(self.pairs)

    def maybe_grow(self, q_holds: bool) -> bool:
        """Scale capacity by the growth factor when the growth condition holds
        and the cap has not been reached. Returns whether m_k changed."""
        if not q_holds or self.m_k >= self.m_max:
            return False
        self.m_k = min(round_half_up(self.growth_factor * self.m_k), self.m_max)
        return True

    def admit(self, pair: CurvaturePair) -> AdmitOutcome:
        """Store the newest pair, making room first when the store is full:
        reset (drop everything) while m_k <= m_reset, otherwise evict the
        oldest pair."""
        outcome = AdmitOutcome.APPEND
        if self.q_k == self.m_k:
            if self.m_k <= self.m_reset:
                self.pairs.clear()
                outcome = AdmitOutcome.RESET
            else:
                self.pairs.popleft()
                outcome = AdmitOutcome.EVICT
        self.pairs.append(pair)
        return outcome


class DevTracker:
    """Sliding window over the last `window_size` validation losses.

    The growth condition reads the sequence of per-step improvements
    delta_k = v_{k-1} - v_k inside the window and holds exactly when those
    improvements are strictly decreasing, i.e. the loss is still falling but
    by less and less.
    """

    def __init__(self, window_size: int):
        if window_size < 2:
            raise ConfigError(f"validation window must hold >= 2 losses, got {window_size}")
        self.window_size = window_size
        self.window: deque[float] = deque(maxlen=window_size)

    def record(self, v: float) -> None:
        self.window.append(float(v))

    @property
    def ready(self) -> bool:
        return len(self.window) == self.window_size

    def deltas(self) -> np.ndarray:
        """Improvements v_{k-1} - v_k across the window, oldest comparison first."""
        if not self.ready:
            raise ValueError(
                f"window holds {len(self.window)} losses, needs {self.window_size}"
            )
        w = np.array(self.window, dtype=np.float64)
        return w[:-1] - w[1:]

    def q_condition(self) -> bool:
        """True when the window is full and its improvements strictly decrease.

        Equal consecutive improvements do not count; before the window fills
        this is conservatively False.
        """
        if not self.ready:
            return False
        d = self.deltas()
        return bool(np.all(d[:-1] > d[1:]))
