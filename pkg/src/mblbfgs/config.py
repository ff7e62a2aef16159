"""Experiment configuration: one declarative key-value file per experiment.

Config files are YAML mappings (JSON works too, being a YAML subset). Every
key is optional except the dataset fields needed for file-backed runs; the
defaults below are the common hyperparameter row used across experiments.

Schema (defaults in parentheses):

    dataset            path to a delimited text file (required for `run`)
    label_column       header name or integer position of the class column
    delimiter          field separator (",")
    header             whether the file has a header row (true)
    test_count         rows held out for the test set (required for `run`)
    validation_fraction  share of the non-test rows used for validation (0.1)
    standardize        rescale features with train-only statistics (true)
    hidden_units       MLP hidden layer width (35)
    activation         tanh | relu | sigmoid ("tanh")
    methods            subset of [mb, mb-am, mb-r, mb-amr, adam] (all five)
    growth_factor      memory scaling factor alpha (2.0)
    memory_init        starting capacity m_0 for adaptive methods (1)
    memory_max         capacity cap m_max for adaptive methods (32)
    val_window         validation losses kept for the growth test, m_val (5)
    memory_reset       reset threshold m_reset for mb-amr (8)
    memory_constant    fixed capacity m_bar for mb and mb-r (10)
    n_bfgs, n_adam     iteration budgets (200, 200)
    overlap            batch overlap ratio o, in (0, 0.5) (0.45)
    r_bfgs, r_adam     batch sizes (256, 64)
    eta_bfgs, eta_adam learning rates (0.5, 0.02)
    curvature_source   "batch" or "overlap" gradient differencing ("batch")
    seed               master seed (0)
    repetitions        Monte Carlo repetitions (1)
    resplit_each_rep   draw a fresh split every repetition (false)
    workers            parallel repetition workers (1)
    track_test         record test loss/CCR every iteration (true)
    trace_every        trace thinning stride (1)
    out_dir            output directory ("results")
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, asdict
from pathlib import Path

import yaml

from .exceptions import ConfigError
from .training import LBFGS_METHODS, Method, parse_method

ALL_METHODS = tuple(m.value for m in Method)


@dataclass
class ExperimentConfig:
    """Fully resolved experiment settings."""

    dataset: str | None = None
    label_column: str | int | None = None
    delimiter: str = ","
    header: bool = True
    test_count: int | None = None
    validation_fraction: float = 0.1
    standardize: bool = True

    hidden_units: int = 35
    activation: str = "tanh"

    methods: list[str] = field(default_factory=lambda: list(ALL_METHODS))

    growth_factor: float = 2.0
    memory_init: int = 1
    memory_max: int = 32
    val_window: int = 5
    memory_reset: int = 8
    memory_constant: int = 10

    n_bfgs: int = 200
    n_adam: int = 200
    overlap: float = 0.45
    r_bfgs: int = 256
    r_adam: int = 64
    eta_bfgs: float = 0.5
    eta_adam: float = 0.02
    curvature_source: str = "batch"

    seed: int = 0
    repetitions: int = 1
    resplit_each_rep: bool = False
    workers: int = 1
    track_test: bool = True
    trace_every: int = 1
    out_dir: str = "results"

    def __post_init__(self):
        self.methods = [parse_method(m).value for m in self.methods]
        self.validate()

    def method_enums(self) -> list[Method]:
        return [Method(m) for m in self.methods]

    def uses_lbfgs(self) -> bool:
        return any(Method(m) in LBFGS_METHODS for m in self.methods)

    def uses_adaptive(self) -> bool:
        return any(Method(m) in (Method.MB_AM, Method.MB_AMR) for m in self.methods)

    def validate(self) -> None:
        def bad(name, why):
            raise ConfigError(f"config field '{name}': {why}")

        if self.uses_lbfgs() and not 0.0 < self.overlap < 0.5:
            bad("overlap", f"must lie in (0, 0.5) for L-BFGS methods, got {self.overlap}")
        if self.memory_init < 1:
            bad("memory_init", f"must be >= 1, got {self.memory_init}")
        if self.memory_init > self.memory_max:
            bad("memory_init", f"{self.memory_init} exceeds memory_max {self.memory_max}")
        if self.val_window < 2:
            bad("val_window", f"must be >= 2, got {self.val_window}")
        if self.memory_reset < 0:
            bad("memory_reset", f"must be >= 0, got {self.memory_reset}")
        if self.memory_constant < 1:
            bad("memory_constant", f"must be >= 1, got {self.memory_constant}")
        if self.growth_factor < 1.0:
            bad("growth_factor", f"must be >= 1, got {self.growth_factor}")
        if not 0.0 <= self.validation_fraction < 1.0:
            bad("validation_fraction", f"must be in [0, 1), got {self.validation_fraction}")
        if self.uses_adaptive() and self.validation_fraction == 0.0:
            bad("validation_fraction", "adaptive-memory methods need a validation split")
        for name in ("n_bfgs", "n_adam"):
            if getattr(self, name) < 0:
                bad(name, "must be >= 0")
        for name in ("r_bfgs", "r_adam", "hidden_units", "repetitions", "workers", "trace_every"):
            if getattr(self, name) < 1:
                bad(name, "must be >= 1")
        for name in ("eta_bfgs", "eta_adam"):
            if not getattr(self, name) > 0:
                bad(name, "must be > 0")
        if self.activation not in ("tanh", "relu", "sigmoid"):
            bad("activation", f"unknown activation {self.activation!r}")
        if self.curvature_source not in ("batch", "overlap"):
            bad("curvature_source", f"must be 'batch' or 'overlap', got {self.curvature_source!r}")
        if not self.methods:
            bad("methods", "at least one method required")
        if self.test_count is not None and self.test_count < 1:
            bad("test_count", f"must be >= 1, got {self.test_count}")

    @classmethod
    def from_mapping(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError(f"config root must be a mapping, got {type(raw).__name__}")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown config field '{unknown[0]}'")
        return cls(**raw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
        return cls.from_mapping(raw or {})

    def to_dict(self) -> dict:
        return asdict(self)

    def resolved_dataset_path(self, relative_to=None) -> Path:
        if self.dataset is None:
            raise ConfigError("config field 'dataset': required for file-backed runs")
        p = Path(self.dataset)
        if not p.is_absolute() and relative_to is not None:
            p = Path(relative_to) / p
        return p
