"""Classification metrics: correct classification rate and per-simulation rank."""
from __future__ import annotations

import numpy as np

from .exceptions import MetricError


def ccr(predictions, labels) -> float:
    """Percentage of predictions matching the labels."""
    predictions = np.asarray(predictions)
    labels = np.asarray(labels)
    if predictions.shape != labels.shape:
        raise MetricError(f"ccr: shapes differ, {predictions.shape} vs {labels.shape}")
    if predictions.size == 0:
        raise MetricError("ccr: empty inputs")
    return float(np.mean(predictions == labels)) * 100.0


def rnk(ccrs) -> np.ndarray:
    """Descending ranks of the competing methods' CCRs: 1 is best.

    Ties receive the average of the tied rank positions, so the output
    always sums to n(n+1)/2.
    """
    c = np.asarray(ccrs, dtype=np.float64)
    if c.ndim != 1 or c.size == 0:
        raise MetricError(f"rnk: need a non-empty 1-D array, got shape {c.shape}")
    ranks = np.empty(c.size)
    for i, v in enumerate(c):
        higher = int(np.sum(c > v))
        ties = int(np.sum(c == v)) - 1
        ranks[i] = higher + 1 + ties / 2.0
    return ranks
