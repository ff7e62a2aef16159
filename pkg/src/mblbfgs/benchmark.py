"""Monte Carlo benchmark harness.

Each repetition draws a fresh weight initialization and batch stream, runs
every configured method on the identical data split and identical starting
parameters (a paired comparison), then ranks the methods by final test CCR.
Aggregates report mean and standard deviation of CCR and rank per method.

Runs that diverge are excluded from the aggregates and reported with their
diagnostics; repetitions missing any method's result are additionally
excluded from the rank statistics, since ranks only make sense over the
full method set.
"""
from __future__ import annotations

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .datasets import Dataset, SplitSpec, load_csv, split, standardize
from .exceptions import ConfigError
from .metrics import rnk
from .model import MlpSpec, init_theta
from .numeric import RngState
from .training import (LBFGS_METHODS, LbfgsVariant, Method, MlpObjective,
                       RunResult, train_adam, train_lbfgs)

# RngState key prefixes for the independent per-run streams
_KEY_INIT, _KEY_LBFGS, _KEY_ADAM, _KEY_SPLIT = 1, 2, 3, 4


@dataclass
class MethodAggregate:
    """Mean/std of CCR and rank for one method over completed repetitions."""

    method: str
    mean_ccr: float
    std_ccr: float
    mean_rnk: float
    std_rnk: float
    n_runs: int
    n_excluded: int


@dataclass
class MonteCarloResult:
    """Everything the harness produced: per-run results plus the aggregate table."""

    repetitions: int
    aggregates: dict[str, MethodAggregate]
    runs: list[RunResult]
    excluded: list[dict] = field(default_factory=list)
    rnk_repetitions: int = 0

    def to_dict(self) -> dict:
        return {
            "repetitions": self.repetitions,
            "rnk_repetitions": self.rnk_repetitions,
            "excluded_runs": self.excluded,
            "methods": {
                name: {
                    "mean_ccr": agg.mean_ccr,
                    "std_ccr": agg.std_ccr,
                    "mean_rnk": agg.mean_rnk,
                    "std_rnk": agg.std_rnk,
                    "completed_runs": agg.n_runs,
                    "excluded_runs": agg.n_excluded,
                }
                for name, agg in self.aggregates.items()
            },
        }


def _prepare_problem(cfg: ExperimentConfig, ds: Dataset, rep: int):
    """Split, standardize, and wrap the dataset for one repetition."""
    split_seed = cfg.seed
    if cfg.resplit_each_rep:
        split_seed = (cfg.seed + 0x9E3779B9 * (rep + _KEY_SPLIT)) & 0x7FFFFFFFFFFFFFFF
    parts = split(ds, cfg.test_count, SplitSpec(cfg.validation_fraction, split_seed))
    scaled = standardize(ds, parts.train) if cfg.standardize else ds
    spec = MlpSpec(ds.n_features, cfg.hidden_units, ds.class_count, cfg.activation)
    objective = MlpObjective(
        spec,
        scaled.features[parts.train], scaled.labels[parts.train],
        scaled.features[parts.val], scaled.labels[parts.val],
        scaled.features[parts.test], scaled.labels[parts.test],
    )
    theta0 = init_theta(spec, RngState(cfg.seed, key=(_KEY_INIT, rep)))
    h = hashlib.sha1(parts.fingerprint().encode())
    h.update(theta0.tobytes())
    return objective, theta0, h.hexdigest()


def run_single(cfg: ExperimentConfig, ds: Dataset, method, rep: int = 0,
               record_parameters: bool = False) -> RunResult:
    """One training run of one method under the given repetition's seeds."""
    method = Method(method)
    if cfg.test_count is None:
        raise ConfigError("config field 'test_count': required to score runs")
    if cfg.test_count >= ds.n_samples:
        raise ConfigError(
            f"config field 'test_count': {cfg.test_count} leaves no training rows "
            f"out of {ds.n_samples}"
        )
    objective, theta0, fingerprint = _prepare_problem(cfg, ds, rep)
    n_train = objective.n_train
    if method in LBFGS_METHODS:
        if cfg.r_bfgs > n_train:
            raise ConfigError(
                f"config field 'r_bfgs': batch size {cfg.r_bfgs} exceeds train size {n_train}"
            )
        variant = LbfgsVariant.for_method(
            method, m_0=cfg.memory_init, m_max=cfg.memory_max,
            m_bar=cfg.memory_constant, m_reset=cfg.memory_reset,
            growth_factor=cfg.growth_factor,
        )
        result = train_lbfgs(
            objective, variant, theta0=theta0, eta=cfg.eta_bfgs,
            batch_size=cfg.r_bfgs, overlap=cfg.overlap, iterations=cfg.n_bfgs,
            val_window=cfg.val_window, rng=RngState(cfg.seed, key=(_KEY_LBFGS, rep)),
            seed=rep, curvature_source=cfg.curvature_source,
            track_test=cfg.track_test, record_parameters=record_parameters,
        )
    else:
        if cfg.r_adam > n_train:
            raise ConfigError(
                f"config field 'r_adam': batch size {cfg.r_adam} exceeds train size {n_train}"
            )
        result = train_adam(
            objective, theta0=theta0, eta=cfg.eta_adam, batch_size=cfg.r_adam,
            iterations=cfg.n_adam, rng=RngState(cfg.seed, key=(_KEY_ADAM, rep)),
            seed=rep, track_test=cfg.track_test, record_parameters=record_parameters,
        )
    result.data_fingerprint = fingerprint
    return result


def _run_repetition(cfg: ExperimentConfig, ds: Dataset, rep: int) -> list[RunResult]:
    return [run_single(cfg, ds, m, rep) for m in cfg.method_enums()]


def monte_carlo(cfg: ExperimentConfig, ds: Dataset | None = None,
                repetitions: int | None = None) -> MonteCarloResult:
    """Run the configured method set for `repetitions` paired repetitions."""
    if ds is None:
        ds = load_csv(cfg.resolved_dataset_path(), cfg.label_column,
                      delimiter=cfg.delimiter, header=cfg.header)
    reps = cfg.repetitions if repetitions is None else repetitions
    if reps < 1:
        raise ConfigError(f"config field 'repetitions': must be >= 1, got {reps}")

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            per_rep = list(pool.map(_run_repetition, [cfg] * reps, [ds] * reps, range(reps)))
    else:
        per_rep = [_run_repetition(cfg, ds, rep) for rep in range(reps)]

    methods = cfg.methods
    runs: list[RunResult] = [r for rep_runs in per_rep for r in rep_runs]
    excluded = [
        {"method": r.method.value, "repetition": r.seed, "reason": r.abort_reason}
        for r in runs if r.aborted
    ]

    ccr_by_method: dict[str, list[float]] = {m: [] for m in methods}
    rnk_by_method: dict[str, list[float]] = {m: [] for m in methods}
    excluded_by_method: dict[str, int] = {m: 0 for m in methods}
    rnk_reps = 0
    for rep_runs in per_rep:
        for r in rep_runs:
            if r.aborted:
                excluded_by_method[r.method.value] += 1
            else:
                ccr_by_method[r.method.value].append(r.final_ccr)
        if all(not r.aborted for r in rep_runs):
            rnk_reps += 1
            ranks = rnk([r.final_ccr for r in rep_runs])
            for r, rank in zip(rep_runs, ranks):
                rnk_by_method[r.method.value].append(float(rank))

    aggregates = {}
    for m in methods:
        ccrs = np.asarray(ccr_by_method[m])
        ranks = np.asarray(rnk_by_method[m])
        aggregates[m] = MethodAggregate(
            method=m,
            mean_ccr=float(ccrs.mean()) if ccrs.size else float("nan"),
            std_ccr=float(ccrs.std()) if ccrs.size else float("nan"),
            mean_rnk=float(ranks.mean()) if ranks.size else float("nan"),
            std_rnk=float(ranks.std()) if ranks.size else float("nan"),
            n_runs=int(ccrs.size),
            n_excluded=excluded_by_method[m],
        )
    return MonteCarloResult(repetitions=reps, aggregates=aggregates, runs=runs,
                            excluded=excluded, rnk_repetitions=rnk_reps)
