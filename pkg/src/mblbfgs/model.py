"""Single-hidden-layer MLP classifier with hand-derived backpropagation.

The network maps an input row x through one dense hidden layer with a
configurable activation and a dense softmax output layer. The training
objective is the mean categorical cross-entropy over a batch; for two
classes this reduces to the usual binary cross-entropy.

Parameters live in one flat vector so optimizers can treat the model as a
generic stochastic objective. The layout is::

    [W1 (n_in x h, row-major), b1 (h), W2 (h x n_classes, row-major), b2 (n_classes)]
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, NumericError
from .numeric import RngState

# floor applied inside log() so a saturated softmax never produces -inf
PROB_FLOOR = 1e-12

_ACTIVATIONS = ("tanh", "relu", "sigmoid")


@dataclass(frozen=True)
class MlpSpec:
    """Architecture of the classifier: feature count, hidden width, classes."""

    n_in: int
    hidden: int
    n_classes: int
    activation: str = "tanh"

    def __post_init__(self):
        if self.n_in < 1 or self.hidden < 1:
            raise ConfigError(f"MlpSpec: n_in and hidden must be >= 1, got {self.n_in}, {self.hidden}")
        if self.n_classes < 2:
            raise ConfigError(f"MlpSpec: n_classes must be >= 2, got {self.n_classes}")
        if self.activation not in _ACTIVATIONS:
            raise ConfigError(f"MlpSpec: unknown activation {self.activation!r}, expected one of {_ACTIVATIONS}")

    @property
    def n_params(self) -> int:
        """Length d of the flat parameter vector, biases included."""
        return (self.n_in + 1) * self.hidden + (self.hidden + 1) * self.n_classes


@dataclass
class Batch:
    """A slice of a dataset: inputs (rows x features) and integer class labels."""

    inputs: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.intp)
        if self.inputs.ndim != 2:
            raise ConfigError(f"Batch: inputs must be 2-D, got shape {self.inputs.shape}")
        if self.inputs.shape[0] < 1:
            raise ConfigError("Batch: needs at least one row")
        if self.labels.shape != (self.inputs.shape[0],):
            raise ConfigError(
                f"Batch: {self.inputs.shape[0]} rows but {self.labels.shape} labels"
            )

    def __len__(self) -> int:
        return self.inputs.shape[0]


@dataclass
class LossAndGrad:
    """Mean cross-entropy over a batch and its gradient w.r.t. the flat parameters."""

    loss: float
    grad: np.ndarray


def unpack(spec: MlpSpec, theta: np.ndarray):
    """Views of the flat vector as (W1, b1, W2, b2)."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (spec.n_params,):
        raise ConfigError(f"theta length {theta.shape} does not match spec d={spec.n_params}")
    i0 = spec.n_in * spec.hidden
    i1 = i0 + spec.hidden
    i2 = i1 + spec.hidden * spec.n_classes
    w1 = theta[:i0].reshape(spec.n_in, spec.hidden)
    b1 = theta[i0:i1]
    w2 = theta[i1:i2].reshape(spec.hidden, spec.n_classes)
    b2 = theta[i2:]
    return w1, b1, w2, b2


def pack(spec: MlpSpec, w1, b1, w2, b2) -> np.ndarray:
    return np.concatenate([
        np.asarray(w1, dtype=np.float64).ravel(),
        np.asarray(b1, dtype=np.float64).ravel(),
        np.asarray(w2, dtype=np.float64).ravel(),
        np.asarray(b2, dtype=np.float64).ravel(),
    ])


def init_theta(spec: MlpSpec, rng: RngState) -> np.ndarray:
    """Initial parameters: per-layer uniform weights in [-a, a] with
    a = sqrt(6 / (fan_in + fan_out)); biases start at zero."""
    a1 = np.sqrt(6.0 / (spec.n_in + spec.hidden))
    a2 = np.sqrt(6.0 / (spec.hidden + spec.n_classes))
    w1 = rng.uniform(-a1, a1, (spec.n_in, spec.hidden))
    w2 = rng.uniform(-a2, a2, (spec.hidden, spec.n_classes))
    return pack(spec, w1, np.zeros(spec.hidden), w2, np.zeros(spec.n_classes))


def _activation(name: str, z: np.ndarray):
    """Returns (activation(z), derivative w.r.t. z)."""
    if name == "tanh":
        a = np.tanh(z)
        return a, 1.0 - a * a
    if name == "relu":
        mask = z > 0.0
        return np.where(mask, z, 0.0), mask.astype(np.float64)
    # sigmoid
    a = 1.0 / (1.0 + np.exp(-z))
    return a, a * (1.0 - a)


def _forward_cached(spec: MlpSpec, theta: np.ndarray, batch: Batch):
    w1, b1, w2, b2 = unpack(spec, theta)
    # overflow here is handled by the finiteness check, not worth a warning
    with np.errstate(over="ignore", invalid="ignore"):
        z1 = batch.inputs @ w1 + b1
        a1, da1 = _activation(spec.activation, z1)
        logits = a1 @ w2 + b2
    if not np.isfinite(logits).all():
        raise NumericError("forward pass produced non-finite activations")
    # row-wise stable softmax
    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    probs = expz / expz.sum(axis=1, keepdims=True)
    return probs, a1, da1, w2


def forward(spec: MlpSpec, theta: np.ndarray, batch: Batch) -> np.ndarray:
    """Class probabilities, one softmax row per batch row."""
    probs, _, _, _ = _forward_cached(spec, theta, batch)
    return probs


def loss_and_grad(spec: MlpSpec, theta: np.ndarray, batch: Batch) -> LossAndGrad:
    """Mean cross-entropy over the batch and its backpropagated gradient."""
    labels = batch.labels
    if labels.min() < 0 or labels.max() >= spec.n_classes:
        raise ConfigError(
            f"labels must lie in [0, {spec.n_classes}), got range "
            f"[{labels.min()}, {labels.max()}]"
        )
    probs, a1, da1, w2 = _forward_cached(spec, theta, batch)
    nrows = len(batch)
    picked = probs[np.arange(nrows), labels]
    loss = float(-np.mean(np.log(np.maximum(picked, PROB_FLOOR))))

    # softmax + cross-entropy: dL/dlogits = (p - onehot) / nrows
    dlogits = probs.copy()
    dlogits[np.arange(nrows), labels] -= 1.0
    dlogits /= nrows

    gw2 = a1.T @ dlogits
    gb2 = dlogits.sum(axis=0)
    dz1 = (dlogits @ w2.T) * da1
    gw1 = batch.inputs.T @ dz1
    gb1 = dz1.sum(axis=0)
    return LossAndGrad(loss=loss, grad=pack(spec, gw1, gb1, gw2, gb2))


def predict(spec: MlpSpec, theta: np.ndarray, batch: Batch) -> np.ndarray:
    """Argmax class per row; ties go to the smallest class index."""
    return np.argmax(forward(spec, theta, batch), axis=1)
