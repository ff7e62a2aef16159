"""Training drivers.

One parameterized quasi-Newton loop covers the four multi-batch L-BFGS
flavors; a separate driver implements Adam. Per iteration the L-BFGS loop:

1. evaluates loss and gradient on the current batch,
2. steps along the two-loop direction with a fixed learning rate,
3. draws the next batch with the configured overlap,
4. forms the curvature pair from gradients of the *same* batch at the old
   and new parameters (or, optionally, gradients restricted to the overlap
   with the next batch),
5. records the validation loss, grows the curvature memory if the variant
   is adaptive and the growth condition holds, and admits the pair unless
   the positive-curvature filter rejects it.

Drivers run a fixed iteration budget; there is no early-stopping rule.
A run aborts (with iteration context preserved) as soon as any loss or
gradient stops being finite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

import numpy as np

from .curvature import CurvaturePair, CurvatureStore, DevTracker
from .direction import two_loop_direction
from .exceptions import ConfigError, NumericError, TrainingDiverged
from .model import Batch, MlpSpec, loss_and_grad, predict
from .numeric import RngState, dot
from .sampling import OverlapSampler, UniformSampler, overlap_of

# a pair is stored only when t.s clears this relative threshold
CURVATURE_TOL = 1e-10


class Method(str, Enum):
    MB = "mb"
    MB_AM = "mb-am"
    MB_R = "mb-r"
    MB_AMR = "mb-amr"
    ADAM = "adam"


LBFGS_METHODS = (Method.MB, Method.MB_AM, Method.MB_R, Method.MB_AMR)


def parse_method(name) -> Method:
    if isinstance(name, Method):
        return name
    key = str(name).strip().lower().replace("_", "-")
    try:
        return Method(key)
    except ValueError:
        raise ConfigError(
            f"unknown method {name!r}; expected one of {[m.value for m in Method]}"
        ) from None


@dataclass(frozen=True)
class LbfgsVariant:
    """Memory policy of one L-BFGS flavor, expressed as store settings."""

    kind: Method
    m_init: int
    m_max: int
    m_reset: int
    growth_factor: float
    adaptive: bool

    @classmethod
    def for_method(cls, kind, *, m_0: int, m_max: int, m_bar: int,
                   m_reset: int, growth_factor: float) -> "LbfgsVariant":
        """Map a method name onto store settings.

        mb      fixed capacity m_bar, evict-oldest when full
        mb-am   capacity grows from m_0 toward m_max, never resets
        mb-r    fixed capacity m_bar, resets every time it fills
        mb-amr  capacity grows from m_0, resets while m_k <= m_reset
        """
        kind = parse_method(kind)
        if kind == Method.MB:
            return cls(kind, m_bar, m_bar, 0, growth_factor, adaptive=False)
        if kind == Method.MB_AM:
            return cls(kind, m_0, m_max, 0, growth_factor, adaptive=True)
        if kind == Method.MB_R:
            return cls(kind, m_bar, m_bar, m_bar, growth_factor, adaptive=False)
        if kind == Method.MB_AMR:
            return cls(kind, m_0, m_max, m_reset, growth_factor, adaptive=True)
        raise ConfigError(f"{kind.value} is not an L-BFGS variant")

    def make_store(self) -> CurvatureStore:
        return CurvatureStore(self.m_init, self.m_max, self.m_reset, self.growth_factor)


class Objective(Protocol):
    """Stochastic objective interface consumed by the drivers."""

    n_train: int

    def loss_and_grad(self, theta: np.ndarray, indices: np.ndarray) -> tuple[float, np.ndarray]:
        """Mean loss and gradient over the given training rows."""
        ...

    def validation_loss(self, theta: np.ndarray) -> float | None:
        """Held-out loss, or None when no validation split exists."""
        ...

    def test_snapshot(self, theta: np.ndarray) -> tuple[float, float] | None:
        """(test loss, test CCR percent), or None when no test split exists."""
        ...


class MlpObjective:
    """MLP classification objective over fixed train/validation/test splits."""

    def __init__(self, spec: MlpSpec, x_train, y_train,
                 x_val=None, y_val=None, x_test=None, y_test=None):
        self.spec = spec
        self.x_train = np.asarray(x_train, dtype=np.float64)
        self.y_train = np.asarray(y_train, dtype=np.intp)
        self.n_train = self.x_train.shape[0]
        self._val = None
        if x_val is not None and len(x_val) > 0:
            self._val = Batch(x_val, y_val)
        self._test = None
        if x_test is not None and len(x_test) > 0:
            self._test = Batch(x_test, y_test)

    @property
    def has_validation(self) -> bool:
        return self._val is not None

    def loss_and_grad(self, theta, indices):
        batch = Batch(self.x_train[indices], self.y_train[indices])
        res = loss_and_grad(self.spec, theta, batch)
        return res.loss, res.grad

    def validation_loss(self, theta):
        if self._val is None:
            return None
        res = loss_and_grad(self.spec, theta, self._val)
        return res.loss

    def test_snapshot(self, theta):
        if self._test is None:
            return None
        res = loss_and_grad(self.spec, theta, self._test)
        pred = predict(self.spec, theta, self._test)
        correct = float(np.mean(pred == self._test.labels)) * 100.0
        return res.loss, correct


@dataclass
class IterationRecord:
    """One row of a run's history (the data behind trace files)."""

    k: int
    train_loss: float
    val_loss: float
    test_loss: float
    test_ccr: float
    m_k: int
    q_k: int


@dataclass
class RunResult:
    """Outcome of one training run under one method and seed."""

    method: Method
    seed: int | None
    history: list[IterationRecord]
    theta: np.ndarray
    final_ccr: float
    aborted: bool = False
    abort_reason: str | None = None
    skipped_pairs: list[int] = field(default_factory=list)
    thetas: list[np.ndarray] | None = None
    data_fingerprint: str | None = None


@dataclass
class TrainState:
    """Mutable L-BFGS loop state across iterations."""

    theta: np.ndarray
    k: int
    store: CurvatureStore
    tracker: DevTracker
    sampler: OverlapSampler
    batch: np.ndarray
    history: list[IterationRecord] = field(default_factory=list)
    skipped_pairs: list[int] = field(default_factory=list)
    thetas: list[np.ndarray] | None = None


@dataclass
class AdamState:
    """Adam moment estimates alongside the parameters."""

    theta: np.ndarray
    m: np.ndarray
    v: np.ndarray
    k: int
    beta1: float
    beta2: float
    eps: float


def _require_finite(value: float | np.ndarray, what: str, *, iteration: int, m_k: int, q_k: int):
    if not np.all(np.isfinite(value)):
        raise TrainingDiverged(f"{what} became non-finite", iteration=iteration, m_k=m_k, q_k=q_k)


def init_lbfgs_state(objective: Objective, variant: LbfgsVariant, *, theta0: np.ndarray,
                     batch_size: int, overlap: float, val_window: int,
                     rng: RngState, record_parameters: bool = False) -> TrainState:
    """State before the first iteration: fresh store and tracker, first batch drawn."""
    sampler = OverlapSampler(objective.n_train, batch_size, overlap, rng)
    state = TrainState(
        theta=np.asarray(theta0, dtype=np.float64).copy(),
        k=0,
        store=variant.make_store(),
        tracker=DevTracker(val_window),
        sampler=sampler,
        batch=sampler.next_batch(),
        thetas=[] if record_parameters else None,
    )
    return state


def lbfgs_step(state: TrainState, variant: LbfgsVariant, objective: Objective, eta: float,
               *, curvature_source: str = "batch", track_test: bool = True) -> TrainState:
    """Run exactly one iteration of the multi-batch loop, mutating `state`."""
    k, store = state.k, state.store
    train_loss, g = objective.loss_and_grad(state.theta, state.batch)
    _require_finite(train_loss, "training loss", iteration=k, m_k=store.m_k, q_k=store.q_k)
    _require_finite(g, "gradient", iteration=k, m_k=store.m_k, q_k=store.q_k)

    result = two_loop_direction(store, g)
    theta_next = state.theta + eta * result.direction
    batch_next = state.sampler.next_batch()

    # curvature pair: gradient difference of one fixed sample set at the two iterates
    if curvature_source == "batch":
        sample, g_old = state.batch, g
    elif curvature_source == "overlap":
        sample = overlap_of(state.batch, batch_next)
        g_old = objective.loss_and_grad(state.theta, sample)[1] if len(sample) else None
    else:
        raise ConfigError(f"curvature_source must be 'batch' or 'overlap', got {curvature_source!r}")
    s = t = None
    if len(sample):
        g_new = objective.loss_and_grad(theta_next, sample)[1]
        _require_finite(g_new, "curvature gradient", iteration=k, m_k=store.m_k, q_k=store.q_k)
        s = theta_next - state.theta
        t = g_new - g_old

    v = objective.validation_loss(theta_next)
    if v is not None:
        _require_finite(v, "validation loss", iteration=k, m_k=store.m_k, q_k=store.q_k)
        state.tracker.record(v)

    if variant.adaptive:
        store.maybe_grow(state.tracker.q_condition())

    if t is not None and dot(t, s) > CURVATURE_TOL * np.linalg.norm(t) * np.linalg.norm(s):
        store.admit(CurvaturePair.from_vectors(s, t))
    else:
        state.skipped_pairs.append(k)

    test_loss = test_ccr = math.nan
    if track_test:
        snap = objective.test_snapshot(theta_next)
        if snap is not None:
            test_loss, test_ccr = snap

    state.history.append(IterationRecord(
        k=k, train_loss=train_loss, val_loss=v if v is not None else math.nan,
        test_loss=test_loss, test_ccr=test_ccr, m_k=store.m_k, q_k=store.q_k,
    ))
    state.theta = theta_next
    state.batch = batch_next
    state.k += 1
    if state.thetas is not None:
        state.thetas.append(theta_next.copy())
    return state


def adam_step(state: AdamState, objective: Objective, eta: float,
              batch: np.ndarray) -> tuple[AdamState, float]:
    """One bias-corrected Adam update; returns the new state and batch loss."""
    loss, g = objective.loss_and_grad(state.theta, batch)
    _require_finite(loss, "training loss", iteration=state.k, m_k=0, q_k=0)
    _require_finite(g, "gradient", iteration=state.k, m_k=0, q_k=0)
    t = state.k + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * g
    v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    m_hat = m / (1.0 - state.beta1 ** t)
    v_hat = v / (1.0 - state.beta2 ** t)
    theta = state.theta - eta * m_hat / (np.sqrt(v_hat) + state.eps)
    _require_finite(theta, "parameter update", iteration=state.k, m_k=0, q_k=0)
    return AdamState(theta=theta, m=m, v=v, k=t, beta1=state.beta1,
                     beta2=state.beta2, eps=state.eps), loss


def _final_result(method: Method, seed, history, theta, objective, *, aborted=False,
                  abort_reason=None, skipped_pairs=(), thetas=None) -> RunResult:
    final_ccr = math.nan
    if not aborted:
        snap = objective.test_snapshot(theta)
        if snap is not None:
            final_ccr = snap[1]
    return RunResult(method=method, seed=seed, history=history, theta=theta,
                     final_ccr=final_ccr, aborted=aborted, abort_reason=abort_reason,
                     skipped_pairs=list(skipped_pairs), thetas=thetas)


def train_lbfgs(objective: Objective, variant: LbfgsVariant, *, theta0: np.ndarray,
                eta: float, batch_size: int, overlap: float, iterations: int,
                val_window: int, rng: RngState, seed: int | None = None,
                curvature_source: str = "batch", track_test: bool = True,
                record_parameters: bool = False) -> RunResult:
    """Run one L-BFGS training for a fixed iteration budget."""
    if variant.adaptive and not getattr(objective, "has_validation", True):
        raise ConfigError(f"{variant.kind.value} needs a validation split to drive memory growth")
    state = init_lbfgs_state(objective, variant, theta0=theta0, batch_size=batch_size,
                             overlap=overlap, val_window=val_window, rng=rng,
                             record_parameters=record_parameters)
    aborted, reason = False, None
    for _ in range(iterations):
        try:
            lbfgs_step(state, variant, objective, eta,
                       curvature_source=curvature_source, track_test=track_test)
        except TrainingDiverged as exc:
            aborted, reason = True, str(exc)
            break
        except NumericError as exc:
            aborted = True
            reason = f"{exc} (iteration={state.k}, m_k={state.store.m_k}, q_k={state.store.q_k})"
            break
    return _final_result(variant.kind, seed, state.history, state.theta, objective,
                         aborted=aborted, abort_reason=reason,
                         skipped_pairs=state.skipped_pairs, thetas=state.thetas)


def train_adam(objective: Objective, *, theta0: np.ndarray, eta: float, batch_size: int,
               iterations: int, rng: RngState, seed: int | None = None,
               beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
               track_test: bool = True, record_parameters: bool = False) -> RunResult:
    """Run one Adam training for a fixed iteration budget."""
    if not 0.0 <= beta1 < 1.0 or not 0.0 <= beta2 < 1.0:
        raise ConfigError(f"Adam betas must lie in [0, 1), got {beta1}, {beta2}")
    theta0 = np.asarray(theta0, dtype=np.float64)
    sampler = UniformSampler(objective.n_train, batch_size, rng)
    state = AdamState(theta=theta0.copy(), m=np.zeros_like(theta0), v=np.zeros_like(theta0),
                      k=0, beta1=beta1, beta2=beta2, eps=eps)
    history: list[IterationRecord] = []
    thetas: list[np.ndarray] | None = [] if record_parameters else None
    aborted, reason = False, None
    for _ in range(iterations):
        batch = sampler.next_batch()
        try:
            state, train_loss = adam_step(state, objective, eta, batch)
            v = objective.validation_loss(state.theta)
            if v is not None:
                _require_finite(v, "validation loss", iteration=state.k - 1, m_k=0, q_k=0)
        except TrainingDiverged as exc:
            aborted, reason = True, str(exc)
            break
        except NumericError as exc:
            aborted, reason = True, f"{exc} (iteration={state.k}, m_k=0, q_k=0)"
            break
        test_loss = test_ccr = math.nan
        if track_test:
            snap = objective.test_snapshot(state.theta)
            if snap is not None:
                test_loss, test_ccr = snap
        history.append(IterationRecord(
            k=state.k - 1, train_loss=train_loss, val_loss=v if v is not None else math.nan,
            test_loss=test_loss, test_ccr=test_ccr, m_k=0, q_k=0,
        ))
        if thetas is not None:
            thetas.append(state.theta.copy())
    return _final_result(Method.ADAM, seed, history, state.theta, objective,
                         aborted=aborted, abort_reason=reason, thetas=thetas)
