"""Partial dependence curves with expected interval bands.

The marginal effect of one feature is the model output averaged over the
training rows while that feature sweeps a grid of observed values. Bands
average the per-row interval bounds, so the band center is exactly the mean
curve and nesting across levels survives the averaging.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fileio
from .dataio import Dataset, Standardization
from .lbc import CalibrationLevels, predict_widths
from .nn_core import Mlp, forward


@dataclass
class PdpResult:
    """Grid plus mean curve and per-level expected interval bounds."""

    feature_name: str
    grid: np.ndarray
    mean_curve: np.ndarray
    levels: tuple[float, ...]
    lower_curves: np.ndarray  # (n_levels, grid_size); empty (0, G) without widths
    upper_curves: np.ndarray
    n_background: int

    def __post_init__(self):
        g = self.grid.shape[0]
        if self.mean_curve.shape != (g,):
            raise ValueError("mean curve length does not match grid")
        want = (len(self.levels), g)
        if self.lower_curves.shape != want or self.upper_curves.shape != want:
            raise ValueError(f"band arrays must have shape {want}")
        if np.any(self.lower_curves > self.mean_curve[None, :]) \
                or np.any(self.upper_curves < self.mean_curve[None, :]):
            raise ValueError("bands must bracket the mean curve")

    def to_csv(self, path):
        header = ["grid", "mean"]
        for a in self.levels:
            header += [f"lower_{a:g}", f"upper_{a:g}"]
        rows = []
        for i in range(self.grid.shape[0]):
            row = [float(self.grid[i]), float(self.mean_curve[i])]
            for li in range(len(self.levels)):
                row += [float(self.lower_curves[li, i]), float(self.upper_curves[li, i])]
            rows.append(row)
        fileio.write_csv(path, header, rows)


def _feature_grid(dataset: Dataset, feature_index: int, grid_size: int) -> np.ndarray:
    col = dataset.features[:, feature_index]
    return np.linspace(float(col.min()), float(col.max()), grid_size)


def _check_args(dataset: Dataset, feature_index: int, grid_size: int):
    if dataset.n_samples == 0:
        raise ValueError("empty dataset")
    if not 0 <= feature_index < dataset.n_features:
        raise ValueError(
            f"feature index {feature_index} out of range for {dataset.n_features} features")
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")


def partial_dependence(model: Mlp, dataset: Dataset, feature_index: int,
                       grid_size: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Mean model output over the background rows at each grid value.

    The grid spans the observed min-max of the chosen feature; background
    rows are the dataset as given (no extrapolation).
    """
    _check_args(dataset, feature_index, grid_size)
    grid = _feature_grid(dataset, feature_index, grid_size)
    curve = np.empty(grid_size)
    x = dataset.features.copy()
    for gi, value in enumerate(grid):
        x[:, feature_index] = value
        curve[gi] = float(np.mean(forward(model, x)[:, 0]))
    return grid, curve


def partial_dependence_with_intervals(mean_model: Mlp, width_model: Mlp,
                                      dataset: Dataset, feature_index: int,
                                      levels: CalibrationLevels,
                                      grid_size: int = 50,
                                      background_subsample: int | None = None,
                                      seed: int = 0) -> PdpResult:
    """Mean curve plus expected interval bounds per calibration level.

    Bounds are averages of the per-row interval edges, i.e. the mean curve
    shifted by the mean width at each level.
    """
    _check_args(dataset, feature_index, grid_size)
    background = dataset
    if background_subsample is not None and background_subsample < dataset.n_samples:
        rng = np.random.default_rng(seed)
        idx = rng.choice(dataset.n_samples, size=background_subsample, replace=False)
        background = dataset.subset(idx)
    grid = _feature_grid(dataset, feature_index, grid_size)
    n_levels = len(levels)
    mean_curve = np.empty(grid_size)
    mean_width = np.empty((n_levels, grid_size))
    x = background.features.copy()
    for gi, value in enumerate(grid):
        x[:, feature_index] = value
        mean_curve[gi] = float(np.mean(forward(mean_model, x)[:, 0]))
        mean_width[:, gi] = predict_widths(width_model, x, levels).mean(axis=0)
    return PdpResult(
        feature_name=dataset.feature_names[feature_index],
        grid=grid,
        mean_curve=mean_curve,
        levels=levels.levels,
        lower_curves=mean_curve[None, :] - mean_width,
        upper_curves=mean_curve[None, :] + mean_width,
        n_background=background.n_samples,
    )


def to_original_units(result: PdpResult, stats: Standardization,
                      feature_index: int) -> PdpResult:
    """Map a result computed in standardized space back to raw units."""
    f_scale = stats.feature_std[feature_index]
    f_mean = stats.feature_mean[feature_index]
    t_scale, t_mean = stats.target_std, stats.target_mean
    return PdpResult(
        feature_name=result.feature_name,
        grid=result.grid * f_scale + f_mean,
        mean_curve=result.mean_curve * t_scale + t_mean,
        levels=result.levels,
        lower_curves=result.lower_curves * t_scale + t_mean,
        upper_curves=result.upper_curves * t_scale + t_mean,
        n_background=result.n_background,
    )
