from pathlib import Path

import numpy as np
import pytest

from mblbfgs.curvature import CurvaturePair

REPO_ROOT = Path(__file__).resolve().parents[1]
CANCER_CSV = REPO_ROOT / "data" / "cancer.csv"
EXPERIMENT1_CONFIG = REPO_ROOT / "configs" / "experiment1.yaml"


class QuadraticObjective:
    """f(theta) = 0.5 (theta - c)^T A (theta - c); ignores batch indices.

    Plays the role of a stochastic objective whose every batch is the full
    function, which makes optimizer behavior exactly checkable.
    """

    def __init__(self, a, c=None, n_train=8):
        self.a = np.asarray(a, dtype=np.float64)
        self.c = np.zeros(len(self.a)) if c is None else np.asarray(c, dtype=np.float64)
        self.n_train = n_train
        self.has_validation = True

    def loss_and_grad(self, theta, indices):
        d = np.asarray(theta, dtype=np.float64) - self.c
        return float(0.5 * d @ self.a @ d), self.a @ d

    def validation_loss(self, theta):
        return self.loss_and_grad(theta, None)[0]

    def test_snapshot(self, theta):
        return None


def make_positive_pairs(gen: np.random.Generator, d: int, count: int) -> list[CurvaturePair]:
    """Random curvature pairs with guaranteed t.s > 0 (t = SPD matrix times s)."""
    pairs = []
    for _ in range(count):
        b = gen.normal(size=(d, d))
        spd = b @ b.T + 0.1 * np.eye(d)
        s = gen.normal(size=d)
        pairs.append(CurvaturePair.from_vectors(s, spd @ s))
    return pairs


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240611)
