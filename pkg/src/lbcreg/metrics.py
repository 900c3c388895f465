"""Hard-indicator coverage, calibration error, and RMSE reporting.

Coverage here is always the exact boundary-inclusive fraction; nothing in
this module is smoothed. The per-level absolute deviations |alpha - coverage|
are aggregated both as a mean and as a sum because either convention can be
found in published tables; the mean is the headline number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fileio
from .dataio import Standardization, target_scale, unstandardize_targets
from .lbc import CalibrationLevels, IntervalPrediction


def _aligned(y, y_hat=None) -> tuple[np.ndarray, np.ndarray | None]:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size == 0:
        raise ValueError("empty input")
    if y_hat is None:
        return y, None
    y_hat = np.asarray(y_hat, dtype=np.float64).reshape(-1)
    if y_hat.shape != y.shape:
        raise ValueError(f"length mismatch: {y.shape} vs {y_hat.shape}")
    return y, y_hat


def empirical_coverage(y, y_hat, delta) -> float:
    """Fraction of targets inside [y_hat - delta, y_hat + delta], edges included."""
    y, y_hat = _aligned(y, y_hat)
    delta = np.broadcast_to(np.asarray(delta, dtype=np.float64), y.shape)
    if np.any(delta < 0):
        raise ValueError("delta must be non-negative")
    inside = (y_hat - delta <= y) & (y <= y_hat + delta)
    return float(np.mean(inside))


def rmse(y_true, y_pred) -> float:
    """Root mean squared error; units follow the inputs."""
    y_true, y_pred = _aligned(y_true, y_pred)
    return float(np.sqrt(np.mean((y_true - y_pred) ** 2)))


def calibration_curve(y, pred: IntervalPrediction,
                      levels: CalibrationLevels) -> list[tuple[float, float]]:
    """(level, empirical coverage) pairs for plotting against the diagonal."""
    y, _ = _aligned(y)
    if pred.widths.shape != (y.shape[0], len(levels)):
        raise ValueError(
            f"widths shape {pred.widths.shape} does not match "
            f"{y.shape[0]} samples x {len(levels)} levels")
    return [(float(a), empirical_coverage(y, pred.mean, pred.widths[:, i]))
            for i, a in enumerate(levels.levels)]


def ece(y, pred: IntervalPrediction,
        levels: CalibrationLevels) -> tuple[list[float], float, float]:
    """Per-level coverages plus (mean, sum) of |level - coverage|."""
    curve = calibration_curve(y, pred, levels)
    coverages = [c for _, c in curve]
    devs = [abs(a - c) for a, c in curve]
    return coverages, float(np.mean(devs)), float(np.sum(devs))


@dataclass
class CalibrationReport:
    """Evaluation bundle for one model on one test set.

    ``rmse`` is in original target units. The interval fields are None for
    point-only methods that produce no widths.
    """

    levels: tuple[float, ...]
    coverages: list[float] | None
    ece_mean: float | None
    ece_sum: float | None
    rmse: float
    n_test: int

    def to_dict(self) -> dict:
        return {
            "levels": [float(a) for a in self.levels],
            "coverages": None if self.coverages is None else [float(c) for c in self.coverages],
            "ece_mean": self.ece_mean,
            "ece_sum": self.ece_sum,
            "rmse": self.rmse,
            "n_test": self.n_test,
        }

    def write_json(self, path):
        fileio.write_json(path, self.to_dict(), schema="calibration_report")


def build_report(y_std, pred: IntervalPrediction | None, mean_std,
                 levels: CalibrationLevels,
                 stats: Standardization | None) -> CalibrationReport:
    """Assemble a report from standardized-space predictions.

    Coverage is computed in standardized space (it is invariant under the
    affine target transform); RMSE is mapped back to original units.
    """
    y_std, mean_std = _aligned(y_std, mean_std)
    if stats is not None:
        err = rmse(unstandardize_targets(y_std, stats),
                   unstandardize_targets(mean_std, stats))
    else:
        err = rmse(y_std, mean_std)
    if pred is None:
        return CalibrationReport(levels=levels.levels, coverages=None,
                                 ece_mean=None, ece_sum=None,
                                 rmse=err, n_test=int(y_std.size))
    coverages, e_mean, e_sum = ece(y_std, pred, levels)
    return CalibrationReport(levels=levels.levels, coverages=coverages,
                             ece_mean=e_mean, ece_sum=e_sum,
                             rmse=err, n_test=int(y_std.size))


def curve_csv(path, levels: CalibrationLevels, curves: dict[str, list[float]]):
    """Calibration-curve table: one coverage column per named curve."""
    names = list(curves)
    header = ["alpha"] + names
    rows = []
    for i, a in enumerate(levels.levels):
        rows.append([float(a)] + [float(curves[n][i]) for n in names])
    fileio.write_csv(path, header, rows)
