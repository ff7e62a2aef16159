"""Multi-batch L-BFGS training for small MLP classifiers.

Four quasi-Newton flavors (fixed memory, adaptive memory, and both with
memory resetting) plus an Adam baseline, a Monte Carlo benchmark harness,
and a scikit-learn compatible classifier wrapper.
"""

from .benchmark import MethodAggregate, MonteCarloResult, monte_carlo, run_single
from .config import ExperimentConfig
from .curvature import AdmitOutcome, CurvaturePair, CurvatureStore, DevTracker
from .datasets import Dataset, Split, SplitSpec, load_csv, split, standardize, synth_gaussian_blobs
from .direction import DirectionResult, dense_bfgs_oracle, two_loop_direction
from .estimator import MlpClassifier
from .metrics import ccr, rnk
from .model import Batch, LossAndGrad, MlpSpec, forward, init_theta, loss_and_grad, predict
from .numeric import RngState, axpy, dot, uniform_indices
from .sampling import OverlapSampler, UniformSampler, overlap_of
from .training import (
    AdamState,
    IterationRecord,
    LbfgsVariant,
    Method,
    MlpObjective,
    RunResult,
    TrainState,
    adam_step,
    lbfgs_step,
    train_adam,
    train_lbfgs,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState", "AdmitOutcome", "Batch", "CurvaturePair", "CurvatureStore",
    "Dataset", "DevTracker", "DirectionResult", "ExperimentConfig",
    "IterationRecord", "LbfgsVariant", "LossAndGrad", "Method",
    "MethodAggregate", "MlpClassifier", "MlpObjective", "MlpSpec",
    "MonteCarloResult", "OverlapSampler", "RngState", "RunResult", "Split",
    "SplitSpec", "TrainState", "UniformSampler", "adam_step", "axpy", "ccr",
    "dense_bfgs_oracle", "dot", "forward", "init_theta", "lbfgs_step",
    "load_csv", "loss_and_grad", "monte_carlo", "overlap_of", "predict",
    "rnk", "run_single", "split", "standardize", "synth_gaussian_blobs",
    "train_adam", "train_lbfgs", "two_loop_direction", "uniform_indices",
]
