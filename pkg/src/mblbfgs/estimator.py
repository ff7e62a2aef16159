"""Scikit-learn compatible classifier trained by the multi-batch optimizers.

The estimator wraps the training drivers behind the usual fit/predict API so
the optimizers compose with pipelines, grid search, and cross-validation.
"""
from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .model import Batch, MlpSpec, forward, init_theta, predict
from .numeric import RngState
from .sampling import round_half_up
from .training import (LBFGS_METHODS, LbfgsVariant, Method, MlpObjective,
                       parse_method, train_adam, train_lbfgs)


def _auto_batch_size(requested, n_train: int, overlap: float) -> int:
    """Largest feasible batch size: either the full train set or small enough
    that the non-overlapping part of the next batch fits outside the current one."""
    r = n_train if requested in (None, "auto") else int(requested)
    r = min(r, n_train)
    if requested in (None, "auto"):
        r = min(r, 256)
    while r < n_train and n_train - r < r - round_half_up(overlap * r):
        r -= 1
    return max(r, 1)


class MlpClassifier(BaseEstimator, ClassifierMixin):
    """Single-hidden-layer MLP classifier with a selectable training method.

    Parameters
    ----------
    hidden_units : int, hidden layer width.
    activation : {"tanh", "relu", "sigmoid"}.
    method : {"mb", "mb-am", "mb-r", "mb-amr", "adam"}
        Multi-batch L-BFGS flavor or the Adam baseline.
    iterations : int, fixed training budget (no early stopping).
    batch_size : int or "auto"
        Rows per batch; "auto" picks min(256, n_train), shrunk if needed to
        keep the configured overlap feasible.
    overlap : float, fraction of consecutive batches shared (L-BFGS only).
    learning_rate : float or None
        None resolves to 0.5 for L-BFGS methods and 0.02 for Adam.
    memory_init, memory_max, memory_constant, memory_reset, growth_factor
        Curvature-memory policy knobs (adaptive start/cap, fixed capacity,
        reset threshold, scaling factor).
    val_window : int, validation losses kept for the memory-growth test.
    validation_fraction : float, share of the fit data held out per fit.
    curvature_source : {"batch", "overlap"}, where gradient differences come from.
    beta1, beta2, epsilon : Adam moment hyperparameters.
    random_state : int, seed for initialization, splitting, and sampling.

    Attributes
    ----------
    classes_ : ndarray of the original class labels.
    theta_ : flat parameter vector after training.
    loss_curve_ : per-iteration training loss.
    n_iter_ : iterations actually executed.
    diverged_ : True when training aborted on non-finite values.
    """

    def __init__(self, hidden_units=35, activation="tanh", method="mb-am",
                 iterations=200, batch_size="auto", overlap=0.45,
                 learning_rate=None, memory_init=1, memory_max=32,
                 memory_constant=10, memory_reset=8, growth_factor=2.0,
                 val_window=5, validation_fraction=0.1,
                 curvature_source="batch", beta1=0.9, beta2=0.999,
                 epsilon=1e-8, random_state=0):
        self.hidden_units = hidden_units
        self.activation = activation
        self.method = method
        self.iterations = iterations
        self.batch_size = batch_size
        self.overlap = overlap
        self.learning_rate = learning_rate
        self.memory_init = memory_init
        self.memory_max = memory_max
        self.memory_constant = memory_constant
        self.memory_reset = memory_reset
        self.growth_factor = growth_factor
        self.val_window = val_window
        self.validation_fraction = validation_fraction
        self.curvature_source = curvature_source
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.random_state = random_state

    def fit(self, X, y):
        """Train the network on (X, y) for the configured iteration budget."""
        X, y = check_X_y(X, y)
        X = np.asarray(X, dtype=np.float64)
        self.classes_ = unique_labels(y)
        if len(self.classes_) < 2:
            raise ValueError("MlpClassifier needs at least two classes in y")
        encoded = np.searchsorted(self.classes_, y)
        self.n_features_in_ = X.shape[1]

        method = parse_method(self.method)
        is_lbfgs = method in LBFGS_METHODS
        eta = self.learning_rate
        if eta is None:
            eta = 0.5 if is_lbfgs else 0.02
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError(f"validation_fraction must be in [0, 1), got {self.validation_fraction}")
        if is_lbfgs and not 0.0 < self.overlap < 0.5:
            raise ValueError(f"overlap must lie in (0, 0.5), got {self.overlap}")

        rng = RngState(0 if self.random_state is None else self.random_state)
        n = X.shape[0]
        n_val = int(np.floor(self.validation_fraction * n))
        adaptive = method in (Method.MB_AM, Method.MB_AMR)
        if adaptive and n_val == 0:
            raise ValueError(
                f"method {method.value!r} needs validation data; raise validation_fraction"
            )
        perm = rng.split(1).permutation(n)
        val_idx, train_idx = perm[:n_val], perm[n_val:]

        spec = MlpSpec(self.n_features_in_, self.hidden_units, len(self.classes_),
                       self.activation)
        objective = MlpObjective(spec, X[train_idx], encoded[train_idx],
                                 X[val_idx], encoded[val_idx])
        theta0 = init_theta(spec, rng.split(2))

        if is_lbfgs:
            variant = LbfgsVariant.for_method(
                method, m_0=self.memory_init, m_max=self.memory_max,
                m_bar=self.memory_constant, m_reset=self.memory_reset,
                growth_factor=self.growth_factor,
            )
            result = train_lbfgs(
                objective, variant, theta0=theta0, eta=eta,
                batch_size=_auto_batch_size(self.batch_size, objective.n_train, self.overlap),
                overlap=self.overlap, iterations=self.iterations,
                val_window=self.val_window, rng=rng.split(3),
                curvature_source=self.curvature_source, track_test=False,
            )
        else:
            result = train_adam(
                objective, theta0=theta0, eta=eta,
                batch_size=min(objective.n_train,
                               64 if self.batch_size in (None, "auto") else int(self.batch_size)),
                iterations=self.iterations, rng=rng.split(3),
                beta1=self.beta1, beta2=self.beta2, eps=self.epsilon,
                track_test=False,
            )

        self.spec_ = spec
        self.theta_ = result.theta
        self.loss_curve_ = [rec.train_loss for rec in result.history]
        self.validation_curve_ = [rec.val_loss for rec in result.history]
        self.memory_trace_ = [rec.m_k for rec in result.history]
        self.n_iter_ = len(result.history)
        self.diverged_ = result.aborted
        if result.aborted:
            warnings.warn(
                f"training aborted early: {result.abort_reason}; "
                "keeping the last finite parameters", RuntimeWarning)
        return self

    def _check_predict_input(self, X) -> np.ndarray:
        check_is_fitted(self, "theta_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return np.asarray(X, dtype=np.float64)

    def predict_proba(self, X):
        """Class membership probabilities, columns ordered like `classes_`."""
        X = self._check_predict_input(X)
        return forward(self.spec_, self.theta_, Batch(X, np.zeros(len(X), dtype=np.intp)))

    def predict(self, X):
        """Predicted class labels."""
        X = self._check_predict_input(X)
        idx = predict(self.spec_, self.theta_, Batch(X, np.zeros(len(X), dtype=np.intp)))
        return self.classes_[idx]
