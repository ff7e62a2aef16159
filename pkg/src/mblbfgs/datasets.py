"""Tabular dataset loading, standardization, and deterministic splits."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, DataFormatError
from .numeric import RngState


@dataclass
class Dataset:
    """In-memory classification dataset; immutable after construction."""

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    name: str = "dataset"

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.intp)
        if self.features.ndim != 2:
            raise DataFormatError(f"features must be 2-D, got shape {self.features.shape}")
        if len(self.labels) != self.features.shape[0]:
            raise DataFormatError(
                f"{self.features.shape[0]} rows but {len(self.labels)} labels"
            )
        if not np.isfinite(self.features).all():
            raise DataFormatError("features contain non-finite values")
        present = np.unique(self.labels)
        if self.class_count < 2:
            raise DataFormatError(f"need >= 2 classes, got {self.class_count}")
        if present.min() < 0 or present.max() >= self.class_count:
            raise DataFormatError(
                f"labels must form a range inside [0, {self.class_count})"
            )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SplitSpec:
    """Validation carve-out policy: fraction of the train portion, plus seed."""

    validation_fraction: float = 0.1
    split_seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError(
                f"validation_fraction must be in [0, 1), got {self.validation_fraction}"
            )


@dataclass
class Split:
    """Disjoint train/validation/test row indices covering a dataset."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha1()
        for part in (self.train, self.val, self.test):
            h.update(np.ascontiguousarray(part, dtype=np.int64).tobytes())
        return h.hexdigest()


def load_csv(path, label_column, *, delimiter: str = ",", header: bool = True,
             name: str | None = None) -> Dataset:
    """Load a delimited text file into a Dataset.

    `label_column` selects the class column by header name (needs header=True)
    or integer position. Labels are re-indexed to contiguous integers in
    first-appearance order. Missing or unparseable cells are errors; no
    imputation happens here.
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError(f"dataset not found: {path}")
    rows: list[list[str]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header_row = None
        for lineno, cells in enumerate(reader, start=1):
            if not cells or all(c.strip() == "" for c in cells):
                continue
            if header and header_row is None:
                header_row = [c.strip() for c in cells]
                continue
            rows.append([c.strip() for c in cells])
    if not rows:
        raise DataFormatError(f"{path}: no data rows")

    width = len(rows[0])
    if isinstance(label_column, int):
        label_idx = label_column if label_column >= 0 else width + label_column
    else:
        if not header or header_row is None:
            raise DataFormatError("label column by name requires a header row")
        try:
            label_idx = header_row.index(str(label_column))
        except ValueError:
            raise DataFormatError(f"label column {label_column!r} not in header {header_row}") from None
    if not 0 <= label_idx < width:
        raise DataFormatError(f"label column index {label_idx} outside row width {width}")

    first_data_line = 2 if header else 1
    features = np.empty((len(rows), width - 1), dtype=np.float64)
    label_names: list[str] = []
    label_map: dict[str, int] = {}
    labels = np.empty(len(rows), dtype=np.intp)
    for i, cells in enumerate(rows):
        lineno = i + first_data_line
        if len(cells) != width:
            raise DataFormatError(
                f"{path}: line {lineno}: expected {width} fields, got {len(cells)}"
            )
        col = 0
        for j, cell in enumerate(cells):
            if j == label_idx:
                continue
            if cell == "":
                raise DataFormatError(f"{path}: line {lineno}: missing value in column {j}")
            try:
                features[i, col] = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}: line {lineno}: cannot parse {cell!r} as a number"
                ) from None
            col += 1
        raw = cells[label_idx]
        if raw == "":
            raise DataFormatError(f"{path}: line {lineno}: missing label")
        if raw not in label_map:
            label_map[raw] = len(label_names)
            label_names.append(raw)
        labels[i] = label_map[raw]

    if len(label_names) < 2:
        raise DataFormatError(f"{path}: needs >= 2 classes, found {label_names}")
    return Dataset(features=features, labels=labels, class_count=len(label_names),
                   name=name or path.stem)


def standardize(ds: Dataset, train_indices) -> Dataset:
    """Rescale every feature to zero mean / unit variance using statistics of
    the train rows only; zero-variance features map to all zeros."""
    train_indices = np.asarray(train_indices, dtype=np.intp)
    if len(train_indices) == 0:
        raise ConfigError("standardize needs at least one train row")
    x_train = ds.features[train_indices]
    mean = x_train.mean(axis=0)
    std = x_train.std(axis=0)
    inv = np.where(std > 0.0, 1.0 / np.where(std > 0.0, std, 1.0), 0.0)
    return Dataset(features=(ds.features - mean) * inv, labels=ds.labels.copy(),
                   class_count=ds.class_count, name=ds.name)


def split(ds: Dataset, test_count: int, spec: SplitSpec) -> Split:
    """Deterministic shuffle-split: `test_count` test rows, then
    validation_fraction of the remainder (floor) as validation, rest train."""
    n = ds.n_samples
    if not 0 <= test_count <= n - 1:
        raise ConfigError(f"test_count {test_count} impossible for {n} samples")
    perm = RngState(spec.split_seed, key=(101,)).permutation(n)
    test = perm[:test_count]
    rest = perm[test_count:]
    n_val = int(np.floor(spec.validation_fraction * len(rest)))
    return Split(train=np.sort(rest[n_val:]), val=np.sort(rest[:n_val]), test=np.sort(test))


def synth_gaussian_blobs(classes: int, per_class: int, n_features: int,
                         separation: float, seed: int) -> Dataset:
    """Isotropic Gaussian clusters at random centers scaled by `separation`,
    labeled by cluster. Desk-scale test substrate."""
    if classes < 1 or per_class < 1 or n_features < 1:
        raise ConfigError("classes, per_class, and n_features must all be >= 1")
    rng = RngState(seed, key=(202,))
    centers = rng.normal((classes, n_features)) * separation
    features = np.empty((classes * per_class, n_features))
    labels = np.empty(classes * per_class, dtype=np.intp)
    for c in range(classes):
        block = slice(c * per_class, (c + 1) * per_class)
        features[block] = centers[c] + rng.normal((per_class, n_features))
        labels[block] = c
    # class_count passes through unclamped; Dataset's invariant rejects classes=1
    return Dataset(features=features, labels=labels, class_count=classes, name="blobs")
