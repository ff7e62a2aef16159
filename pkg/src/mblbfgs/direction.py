"""Quasi-Newton search direction via the L-BFGS two-loop recursion.

The recursion applies the inverse-Hessian approximation implied by the
stored curvature pairs directly to a gradient in O(m d) time, never
materializing the d x d matrix. A dense reference that does materialize it
(O(d^2), test scale only) is provided as an independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .curvature import CurvaturePair, CurvatureStore
from .exceptions import NumericError
from .numeric import dot


@dataclass
class DirectionResult:
    """Search direction -H^{-1} g and the initial scaling gamma used for H."""

    direction: np.ndarray
    gamma: float


def initial_scaling(pairs: Sequence[CurvaturePair]) -> float:
    """gamma = (s.t)/(t.t) of the newest pair; 1 when no pairs are stored."""
    if not pairs:
        return 1.0
    last = pairs[-1]
    return dot(last.s, last.t) / dot(last.t, last.t)


def two_loop_direction(store: CurvatureStore, g: np.ndarray) -> DirectionResult:
    """Compute -H^{-1} g from the store's pairs (applied oldest to newest)
    with initial matrix gamma * I. With an empty store this is plain
    steepest descent, -g."""
    pairs = list(store.pairs)
    g = np.asarray(g, dtype=np.float64)
    gamma = initial_scaling(pairs)

    q = g.copy()
    alphas = np.empty(len(pairs))
    for i in range(len(pairs) - 1, -1, -1):
        p = pairs[i]
        if not np.isfinite(p.rho):
            raise NumericError(f"corrupt curvature store: rho={p.rho} at slot {i}")
        alphas[i] = p.rho * dot(p.s, q)
        q -= alphas[i] * p.t
    r = gamma * q
    for i, p in enumerate(pairs):
        beta = p.rho * dot(p.t, r)
        r += (alphas[i] - beta) * p.s
    return DirectionResult(direction=-r, gamma=gamma)


def dense_inverse_hessian(pairs: Sequence[CurvaturePair], gamma: float | None = None) -> np.ndarray:
    """Materialize H^{-1} by the rank-two update
    H' = V^T H V + rho s s^T with V = I - rho t s^T, applied over the pairs
    oldest to newest starting from gamma * I. Test scaffolding: O(d^2)."""
    if not pairs:
        raise ValueError("need at least one pair to size the matrix; handle the empty case in the caller")
    if gamma is None:
        gamma = initial_scaling(pairs)
    d = len(pairs[0].s)
    h = gamma * np.eye(d)
    eye = np.eye(d)
    for p in pairs:
        v = eye - p.rho * np.outer(p.t, p.s)
        h = v.T @ h @ v + p.rho * np.outer(p.s, p.s)
    return h


def dense_bfgs_oracle(pairs: Sequence[CurvaturePair], g: np.ndarray, gamma: float | None = None) -> np.ndarray:
    """Reference direction -H^{-1} g with H^{-1} built explicitly."""
    g = np.asarray(g, dtype=np.float64)
    if not pairs:
        scale = 1.0 if gamma is None else gamma
        return -scale * g
    return -(dense_inverse_hessian(pairs, gamma) @ g)
