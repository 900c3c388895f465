"""CSV ingestion, standardization, and train/test + k-fold split plans.

Parsing is strict: any row with a missing, non-numeric, or non-finite cell
is dropped and counted, never imputed. Standardization uses the population
convention (divide by N) and is always computed on training rows only.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np


@dataclass
class Standardization:
    """Per-column statistics needed to reproduce or invert the transform."""

    feature_mean: np.ndarray
    feature_std: np.ndarray       # 1.0 is stored for constant columns
    target_mean: float
    target_std: float
    constant_features: list[int]  # indices of zero-variance columns, mapped to 0

    def to_dict(self) -> dict:
        return {
            "feature_mean": [float(v) for v in self.feature_mean],
            "feature_std": [float(v) for v in self.feature_std],
            "target_mean": float(self.target_mean),
            "target_std": float(self.target_std),
            "constant_features": list(self.constant_features),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Standardization":
        return cls(
            feature_mean=np.asarray(d["feature_mean"], dtype=np.float64),
            feature_std=np.asarray(d["feature_std"], dtype=np.float64),
            target_mean=float(d["target_mean"]),
            target_std=float(d["target_std"]),
            constant_features=[int(i) for i in d["constant_features"]],
        )


@dataclass
class Dataset:
    """Feature matrix plus targets; immutable by convention after creation."""

    features: np.ndarray
    targets: np.ndarray
    feature_names: list[str]
    standardization: Standardization | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {self.features.shape}")
        if self.targets.shape != (self.features.shape[0],):
            raise ValueError(
                f"targets shape {self.targets.shape} does not match "
                f"{self.features.shape[0]} feature rows"
            )
        if not (np.isfinite(self.features).all() and np.isfinite(self.targets).all()):
            raise ValueError("dataset contains non-finite entries")
        if len(self.feature_names) != self.features.shape[1]:
            raise ValueError("feature_names length does not match feature columns")

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[idx], self.targets[idx],
                       list(self.feature_names), self.standardization)


@dataclass
class LoadReport:
    rows_read: int
    rows_dropped: int
    columns: list[str]
    target_column: str
    constant_features: list[str]

    def to_dict(self) -> dict:
        return {
            "rows_read": self.rows_read,
            "rows_dropped": self.rows_dropped,
            "n_rows": self.rows_read - self.rows_dropped,
            "columns": list(self.columns),
            "target_column": self.target_column,
            "constant_features": list(self.constant_features),
        }


@dataclass
class SplitPlan:
    """Holdout split plus a k-fold partition over the same index range."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    folds: list[np.ndarray]
    seed: int
    n: int

    @property
    def k_folds(self) -> int:
        return len(self.folds)

    def fold_test(self, j: int) -> np.ndarray:
        return self.folds[j]

    def fold_train(self, j: int) -> np.ndarray:
        rest = [f for i, f in enumerate(self.folds) if i != j]
        return np.sort(np.concatenate(rest))


def _parse_row(cells: list[str]) -> np.ndarray | None:
    """All-or-nothing float parse; None marks the row for dropping."""
    vals = np.empty(len(cells))
    for i, cell in enumerate(cells):
        text = cell.strip()
        if not text:
            return None
        try:
            vals[i] = float(text)
        except ValueError:
            return None
    if not np.isfinite(vals).all():
        return None
    return vals


def _looks_like_header(cells: list[str]) -> bool:
    return _parse_row(cells) is None


def load_csv(path, target_column, delimiter: str = ",",
             has_header: bool | None = None) -> tuple[Dataset, LoadReport]:
    """Parse a numeric CSV into a Dataset, dropping unusable rows.

    ``target_column`` is a column name (requires a header) or 0-based index.
    ``has_header=None`` sniffs: a first row that does not parse as numbers
    is treated as a header.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh, delimiter=delimiter) if r]
    if not rows:
        raise ValueError(f"{path}: empty file")

    if has_header is None:
        has_header = _looks_like_header(rows[0])
    if has_header:
        columns = [c.strip() for c in rows[0]]
        body = rows[1:]
    else:
        columns = [f"col{i}" for i in range(len(rows[0]))]
        body = rows

    if isinstance(target_column, int) or (isinstance(target_column, str)
                                          and target_column.lstrip("-").isdigit()
                                          and target_column not in columns):
        t_idx = int(target_column)
        if not 0 <= t_idx < len(columns):
            raise ValueError(f"target column index {t_idx} out of range for {len(columns)} columns")
    else:
        if target_column not in columns:
            raise ValueError(f"target column {target_column!r} not found in {columns}")
        t_idx = columns.index(target_column)

    n_cols = len(columns)
    kept = []
    dropped = 0
    for cells in body:
        vals = _parse_row(cells) if len(cells) == n_cols else None
        if vals is None:
            dropped += 1
        else:
            kept.append(vals)
    if not kept:
        raise ValueError(f"{path}: all {len(body)} data rows dropped, nothing to load")

    data = np.vstack(kept)
    targets = data[:, t_idx]
    features = np.delete(data, t_idx, axis=1)
    feature_names = [c for i, c in enumerate(columns) if i != t_idx]

    constant = [feature_names[j] for j in range(features.shape[1])
                if np.ptp(features[:, j]) == 0.0]
    report = LoadReport(
        rows_read=len(body),
        rows_dropped=dropped,
        columns=columns,
        target_column=columns[t_idx],
        constant_features=constant,
    )
    return Dataset(features, targets, feature_names), report


def standardize(train: Dataset, others: tuple[Dataset, ...] | list[Dataset] = ()
                ) -> tuple[Dataset, list[Dataset]]:
    """Zero-mean unit-variance copies; statistics come from ``train`` only.

    Constant feature columns map to all-zeros and are flagged in the attached
    Standardization. A constant target is an error.
    """
    if train.n_samples == 0:
        raise ValueError("cannot standardize an empty training set")
    f_mean = train.features.mean(axis=0)
    f_std = train.features.std(axis=0)  # population convention
    t_mean = float(train.targets.mean())
    t_std = float(train.targets.std())
    if t_std == 0.0:
        raise ValueError("target column has zero variance on the training rows")
    constant = [int(j) for j in np.nonzero(f_std == 0.0)[0]]
    safe_std = f_std.copy()
    safe_std[f_std == 0.0] = 1.0
    stats = Standardization(f_mean, safe_std, t_mean, t_std, constant)

    def apply(ds: Dataset) -> Dataset:
        feats = (ds.features - stats.feature_mean) / stats.feature_std
        if constant:
            feats[:, constant] = 0.0
        targs = (ds.targets - stats.target_mean) / stats.target_std
        return Dataset(feats, targs, list(ds.feature_names), stats)

    return apply(train), [apply(d) for d in others]


def unstandardize_targets(y_std, stats: Standardization) -> np.ndarray:
    return np.asarray(y_std) * stats.target_std + stats.target_mean


def unstandardize_features(x_std, stats: Standardization) -> np.ndarray:
    return np.asarray(x_std) * stats.feature_std + stats.feature_mean


def target_scale(stats: Standardization | None) -> float:
    """Multiplier taking standardized residuals/widths to original units."""
    return 1.0 if stats is None else stats.target_std


def make_splits(n: int, test_fraction: float = 0.2, k_folds: int = 5,
                seed: int = 0) -> SplitPlan:
    """Deterministic holdout + k-fold partition of range(n)."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    if k_folds < 1:
        raise ValueError(f"k_folds must be >= 1, got {k_folds}")
    if n < max(k_folds, 2):
        raise ValueError(f"n={n} is too small for {k_folds} folds")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_test = int(round(n * test_fraction))
    n_test = min(max(n_test, 1), n - 1)
    test = np.sort(perm[:n_test])
    train = np.sort(perm[n_test:])
    folds = [np.sort(f) for f in np.array_split(perm, k_folds)]
    return SplitPlan(train_indices=train, test_indices=test, folds=folds,
                     seed=seed, n=n)
