"""Comparison trainers: plain MSE net, heteroscedastic net, MC dropout.

All three share the architecture and optimizer of the calibration trainer so
differences in the reported metrics come from the objectives, not capacity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import kernels
from .dataio import Dataset
from .lbc import CalibrationLevels, IntervalPrediction, TrainingDiverged, TrainingHistory
from .nn_core import Mlp, adam_step, backward, forward_cached, init_mlp, optimizer_state


@dataclass
class GaussianPrediction:
    """Per-sample predictive mean and standard deviation (std > 0)."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        if self.mean.shape != self.std.shape or self.mean.ndim != 1:
            raise ValueError("mean and std must be 1-D and aligned")
        if np.any(self.std < 0.0):
            raise ValueError("std must be non-negative")


@dataclass
class BaselineConfig:
    """Shared trainer knobs for the non-calibration methods."""

    iterations: int = 1000
    learning_rate: float = 5e-5
    hidden_dims: tuple[int, ...] = (64, 64, 64, 64, 64)
    batch_size: int = 512
    full_batch_limit: int = 2048
    dropout_p: float = 0.1
    mc_passes: int = 50
    logvar_floor: float = -10.0
    seed: int = 0

    def validate(self) -> list[str]:
        problems = []
        if self.iterations < 0:
            problems.append(f"iterations must be >= 0, got {self.iterations}")
        if self.learning_rate <= 0:
            problems.append(f"learning rate must be positive, got {self.learning_rate}")
        if not 0.0 <= self.dropout_p < 1.0:
            problems.append(f"dropout_p must be in [0, 1), got {self.dropout_p}")
        if self.mc_passes < 2:
            problems.append(f"mc_passes must be >= 2, got {self.mc_passes}")
        return problems


def normal_quantile(p: float) -> float:
    """Standard-normal quantile (inverse CDF)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"quantile argument must be in (0, 1), got {p}")
    return float(ndtri(p))


def gaussian_interval_widths(std, levels: CalibrationLevels) -> np.ndarray:
    """Half-widths z_{(1+a)/2} * std; nested because the quantile grows with a."""
    z = np.array([normal_quantile((1.0 + a) / 2.0) for a in levels.levels])
    return np.asarray(std, dtype=np.float64)[:, None] * z[None, :]


def gaussian_intervals(pred: GaussianPrediction,
                       levels: CalibrationLevels) -> IntervalPrediction:
    return IntervalPrediction(mean=pred.mean,
                              widths=gaussian_interval_widths(pred.std, levels))


def _batch(rng, n: int, config: BaselineConfig):
    if n <= config.full_batch_limit:
        return slice(None)
    return rng.choice(n, size=min(config.batch_size, n), replace=False)


def mse_loss_with_grad(out, y) -> tuple[float, np.ndarray]:
    """Mean squared error over the batch and its gradient w.r.t. the outputs."""
    r = out[:, 0] - y
    loss = float(np.mean(r * r))
    return loss, (2.0 * r / y.shape[0])[:, None]


def gaussian_nll_with_grad(out, y, floor: float) -> tuple[float, np.ndarray]:
    """Mean Gaussian negative log-likelihood for a (mean, log-variance) head."""
    mu = np.ascontiguousarray(out[:, 0])
    raw = np.ascontiguousarray(out[:, 1])
    loss, g_mu, g_s = kernels.gaussian_nll_core(mu, raw, np.ascontiguousarray(y), floor)
    return float(loss), np.stack([g_mu, g_s], axis=1)


def _run_training(dataset: Dataset, config: BaselineConfig, out_dim: int,
                  loss_fn, dropout_p: float = 0.0) -> tuple[Mlp, TrainingHistory]:
    problems = config.validate()
    if problems:
        raise ValueError("; ".join(problems))
    rng = np.random.default_rng(config.seed)
    x, y = dataset.features, dataset.targets
    n, d = x.shape
    model = init_mlp([d, *config.hidden_dims, out_dim], head="identity", rng=rng)
    opt = optimizer_state(model, config.learning_rate)
    history = TrainingHistory()
    for t in range(1, config.iterations + 1):
        idx = _batch(rng, n, config)
        xb, yb = x[idx], y[idx]
        try:
            out, cache = forward_cached(model, xb, dropout_p=dropout_p, rng=rng)
            loss, upstream = loss_fn(out, yb)
            if not np.isfinite(loss):
                raise FloatingPointError("non-finite training loss")
            adam_step(model, backward(model, xb, upstream, cache), opt)
        except FloatingPointError as exc:
            raise TrainingDiverged(t, str(exc)) from exc
        history.record(t, float("nan"), loss, loss)
    return model, history


def train_mse(dataset: Dataset, config: BaselineConfig) -> tuple[Mlp, TrainingHistory]:
    """Squared-error point estimator; the no-uncertainty reference."""
    return _run_training(dataset, config, 1, mse_loss_with_grad)


def train_mse_dropout(dataset: Dataset, config: BaselineConfig) -> tuple[Mlp, TrainingHistory]:
    """Squared-error training with inverted dropout on every hidden layer,
    the model MC-dropout prediction expects."""
    return _run_training(dataset, config, 1, mse_loss_with_grad,
                         dropout_p=config.dropout_p)


def train_hnn(dataset: Dataset, config: BaselineConfig) -> tuple[Mlp, TrainingHistory]:
    """Heteroscedastic net: 2-output head (mean, log-variance), NLL objective."""
    floor = config.logvar_floor
    return _run_training(dataset, config, 2,
                         lambda out, y: gaussian_nll_with_grad(out, y, floor))


def predict_hnn(model: Mlp, x_batch, logvar_floor: float = -10.0) -> GaussianPrediction:
    if model.output_dim != 2:
        raise ValueError("heteroscedastic model must have a 2-dim head")
    out, _ = forward_cached(model, x_batch)
    std = np.sqrt(np.exp(np.maximum(out[:, 1], logvar_floor)))
    return GaussianPrediction(mean=out[:, 0], std=std)


def predict_mc_dropout(model: Mlp, x_batch, passes: int, seed: int,
                       dropout_p: float = 0.1) -> GaussianPrediction:
    """Predictive mean/std over stochastic forward passes with dropout left on.

    Pass i draws its masks from a stream seeded by (seed, i), so results are
    reproducible and passes could be evaluated in any order.
    """
    if passes < 2:
        raise ValueError(f"need at least 2 stochastic passes, got {passes}")
    x_batch = np.asarray(x_batch, dtype=np.float64)
    outs = np.empty((passes, x_batch.shape[0]))
    for i in range(passes):
        pass_rng = np.random.default_rng((seed, i))
        out, _ = forward_cached(model, x_batch, dropout_p=dropout_p, rng=pass_rng)
        outs[i] = out[:, 0]
    return GaussianPrediction(mean=outs.mean(axis=0), std=outs.std(axis=0, ddof=1))
