"""Calibration-driven regression: alternating mean / interval-width training.

Two networks are trained against each other. The width estimator G maps an
input to one interval half-width per calibration level and is fitted so the
smooth empirical coverage at a sampled level matches that level, with an
absolute-width penalty against trivial solutions. The mean estimator F is
then pulled by a width-weighted hinge so targets land inside the (slightly
shrunk) intervals. Reported coverage always uses the hard indicator; the
sigmoid surrogate exists only to give the width loss a gradient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fileio, kernels
from .dataio import Dataset, target_scale
from .nn_core import (Mlp, adam_step, backward, forward, forward_cached,
                      init_mlp, optimizer_state)

DEFAULT_LEVELS = (0.1, 0.3, 0.5, 0.7, 0.9)

WIDTH_WEIGHT_EPS = 1e-12  # unreachable with a positive head; documents the contract


class TrainingDiverged(RuntimeError):
    """Raised when a loss or update goes non-finite; carries the iteration."""

    def __init__(self, iteration: int, message: str):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass
class CalibrationLevels:
    """Strictly increasing confidence levels in (0, 1)."""

    levels: tuple[float, ...] = DEFAULT_LEVELS

    def __post_init__(self):
        lv = tuple(float(a) for a in self.levels)
        if not lv:
            raise ValueError("need at least one calibration level")
        if any(not 0.0 < a < 1.0 for a in lv):
            raise ValueError(f"levels must lie in (0, 1), got {lv}")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise ValueError(f"levels must be strictly increasing, got {lv}")
        self.levels = lv

    def __len__(self) -> int:
        return len(self.levels)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.levels, dtype=np.float64)


@dataclass
class IntervalPrediction:
    """Per-sample mean plus one non-negative half-width per level, nested."""

    mean: np.ndarray
    widths: np.ndarray  # (n, n_levels), non-decreasing along axis 1

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.widths = np.asarray(self.widths, dtype=np.float64)
        if self.mean.ndim != 1 or self.widths.ndim != 2 \
                or self.widths.shape[0] != self.mean.shape[0]:
            raise ValueError(
                f"mean {self.mean.shape} and widths {self.widths.shape} do not align")
        if np.any(self.widths < 0.0):
            raise ValueError("interval widths must be non-negative")
        if np.any(np.diff(self.widths, axis=1) < 0.0):
            raise ValueError("widths must be non-decreasing across levels")

    def lower(self) -> np.ndarray:
        return self.mean[:, None] - self.widths

    def upper(self) -> np.ndarray:
        return self.mean[:, None] + self.widths


@dataclass
class LbcConfig:
    """Hyperparameters of the alternating trainer; defaults match the
    evaluation protocol this package reproduces."""

    lambda1: float = 0.1
    lambda2: float = 0.1
    tau: float = 0.05
    iterations: int = 1000
    lr_mean: float = 5e-5
    lr_width: float = 1e-4
    sharpness: float = 50.0
    hidden_dims: tuple[int, ...] = (64, 64, 64, 64, 64)
    batch_size: int = 512
    full_batch_limit: int = 2048
    warm_start_iterations: int = 0
    val_every: int = 100
    seed: int = 0

    def validate(self) -> list[str]:
        """All contract violations at once, as human-readable strings."""
        problems = []
        if self.lambda1 < 0 or self.lambda2 < 0:
            problems.append(f"lambda1/lambda2 must be >= 0, got {self.lambda1}/{self.lambda2}")
        if self.tau < 0:
            problems.append(f"tau must be >= 0, got {self.tau}")
        if self.iterations < 0:
            problems.append(f"iterations must be >= 0, got {self.iterations}")
        if self.lr_mean <= 0 or self.lr_width <= 0:
            problems.append(f"learning rates must be positive, got {self.lr_mean}/{self.lr_width}")
        if self.sharpness <= 0:
            problems.append(f"sharpness must be positive, got {self.sharpness}")
        if not self.hidden_dims or any(h < 1 for h in self.hidden_dims):
            problems.append(f"hidden_dims must be positive, got {self.hidden_dims}")
        if self.batch_size < 1:
            problems.append(f"batch_size must be >= 1, got {self.batch_size}")
        if self.warm_start_iterations < 0:
            problems.append("warm_start_iterations must be >= 0")
        return problems


def _as_vec(x, name: str) -> np.ndarray:
    v = np.ascontiguousarray(np.asarray(x, dtype=np.float64).reshape(-1))
    if not np.isfinite(v).all():
        raise ValueError(f"{name} contains non-finite values")
    return v


def predict_widths(width_model: Mlp, x_batch, levels: CalibrationLevels) -> np.ndarray:
    """Positive, per-row non-decreasing half-widths, one column per level."""
    if width_model.output_dim != len(levels):
        raise ValueError(
            f"width model emits {width_model.output_dim} outputs, "
            f"but there are {len(levels)} levels")
    if width_model.head != "cumulative_softplus":
        raise ValueError("width model must use the cumulative_softplus head")
    return forward(width_model, x_batch)


def predict_intervals(mean_model: Mlp, width_model: Mlp, x_batch,
                      levels: CalibrationLevels) -> IntervalPrediction:
    if mean_model.output_dim != 1:
        raise ValueError("mean model must have a single output")
    mean = forward(mean_model, x_batch)[:, 0]
    return IntervalPrediction(mean=mean, widths=predict_widths(width_model, x_batch, levels))


def coverage_indicator_smooth(y, y_hat, delta, k: float) -> np.ndarray:
    """sigmoid(k*(y-(y_hat-delta))) * sigmoid(k*((y_hat+delta)-y)) per sample;
    approaches the hard membership indicator as k grows."""
    if k <= 0:
        raise ValueError(f"sharpness k must be positive, got {k}")
    y, y_hat = _as_vec(y, "y"), _as_vec(y_hat, "y_hat")
    delta = _as_vec(np.broadcast_to(np.asarray(delta, dtype=np.float64), y.shape), "delta")
    if np.any(delta < 0):
        raise ValueError("delta must be non-negative")
    return kernels.smooth_coverage(y, y_hat, delta, float(k))


def loss_g(y, y_hat, widths_for_alpha, alpha: float, config: LbcConfig) -> float:
    """Width-estimator loss at one level: |alpha - smooth coverage| plus the
    mean absolute distance of both interval edges from the target."""
    loss, _ = loss_g_with_width_grad(y, y_hat, widths_for_alpha, alpha, config)
    return loss


def loss_g_with_width_grad(y, y_hat, widths_for_alpha, alpha: float,
                           config: LbcConfig) -> tuple[float, np.ndarray]:
    y, y_hat = _as_vec(y, "y"), _as_vec(y_hat, "y_hat")
    delta = _as_vec(widths_for_alpha, "widths")
    loss, grad = kernels.interval_loss_core(
        y, y_hat, delta, float(alpha), config.sharpness,
        config.lambda1, config.lambda2)
    if not np.isfinite(loss):
        raise FloatingPointError("non-finite width-estimator loss")
    return float(loss), grad


def loss_f(y, y_hat, widths_for_alpha, tau: float) -> float:
    """Width-weighted hinge pulling each target into its tau-shrunk interval."""
    loss, _ = loss_f_with_mean_grad(y, y_hat, widths_for_alpha, tau)
    return loss


def loss_f_with_mean_grad(y, y_hat, widths_for_alpha,
                          tau: float) -> tuple[float, np.ndarray]:
    y, y_hat = _as_vec(y, "y"), _as_vec(y_hat, "y_hat")
    delta = _as_vec(widths_for_alpha, "widths")
    loss, grad = kernels.hinge_loss_core(y, y_hat, delta, float(tau), WIDTH_WEIGHT_EPS)
    if not np.isfinite(loss):
        raise FloatingPointError("non-finite mean-estimator loss")
    return float(loss), grad


@dataclass
class TrainingHistory:
    """Per-iteration losses plus periodic validation metrics."""

    iterations: list[int] = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)
    loss_g: list[float] = field(default_factory=list)
    loss_f: list[float] = field(default_factory=list)
    val_points: dict[int, tuple[float, float]] = field(default_factory=dict)  # it -> (rmse, ece)

    def record(self, iteration: int, alpha: float, lg: float, lf: float):
        self.iterations.append(iteration)
        self.alphas.append(alpha)
        self.loss_g.append(lg)
        self.loss_f.append(lf)

    def to_csv(self, path):
        with_val = bool(self.val_points)
        header = ["iteration", "alpha", "loss_g", "loss_f"]
        if with_val:
            header += ["val_rmse", "val_ece_mean"]
        rows = []
        for i, it in enumerate(self.iterations):
            row = [it, self.alphas[i], self.loss_g[i], self.loss_f[i]]
            if with_val:
                if it in self.val_points:
                    row += [self.val_points[it][0], self.val_points[it][1]]
                else:
                    row += ["", ""]
            rows.append(row)
        fileio.write_csv(path, header, rows)


def _batch_indices(rng, n: int, config: LbcConfig) -> np.ndarray | slice:
    if n <= config.full_batch_limit:
        return slice(None)
    return rng.choice(n, size=min(config.batch_size, n), replace=False)


def _hard_ece(y, pred: IntervalPrediction, levels: CalibrationLevels) -> float:
    lo, hi = pred.lower(), pred.upper()
    inside = (lo <= y[:, None]) & (y[:, None] <= hi)
    return float(np.mean(np.abs(levels.as_array() - inside.mean(axis=0))))


def train_lbc(train: Dataset, config: LbcConfig,
              levels: CalibrationLevels | None = None,
              val: Dataset | None = None) -> tuple[Mlp, Mlp, TrainingHistory]:
    """Alternating optimization of the width and mean estimators.

    Each iteration samples one calibration level, takes a width-loss step on
    G with F frozen, then a hinge-loss step on F with the refreshed G frozen.
    Deterministic for a fixed config seed.
    """
    if levels is None:
        levels = CalibrationLevels()
    problems = config.validate()
    if problems:
        raise ValueError("; ".join(problems))

    rng = np.random.default_rng(config.seed)
    x, y = train.features, train.targets
    n, d = x.shape
    mean_model = init_mlp([d, *config.hidden_dims, 1], head="identity", rng=rng)
    width_model = init_mlp([d, *config.hidden_dims, len(levels)],
                           head="cumulative_softplus", rng=rng)
    opt_mean = optimizer_state(mean_model, config.lr_mean)
    opt_width = optimizer_state(width_model, config.lr_width)
    history = TrainingHistory()
    alphas = levels.as_array()

    for t in range(config.warm_start_iterations):
        idx = _batch_indices(rng, n, config)
        xb, yb = x[idx], y[idx]
        out, cache = forward_cached(mean_model, xb)
        upstream = 2.0 * (out - yb[:, None]) / xb.shape[0]
        adam_step(mean_model, backward(mean_model, xb, upstream, cache), opt_mean)

    for t in range(1, config.iterations + 1):
        j = int(rng.integers(len(levels)))
        alpha = float(alphas[j])
        try:
            # width step, mean frozen
            idx = _batch_indices(rng, n, config)
            xb, yb = x[idx], y[idx]
            y_hat = forward(mean_model, xb)[:, 0]
            w_out, w_cache = forward_cached(width_model, xb)
            lg, g_delta = loss_g_with_width_grad(
                yb, y_hat, w_out[:, j], alpha, config)
            upstream = np.zeros_like(w_out)
            upstream[:, j] = g_delta
            adam_step(width_model, backward(width_model, xb, upstream, w_cache), opt_width)

            # mean step, width frozen
            idx = _batch_indices(rng, n, config)
            xb, yb = x[idx], y[idx]
            delta = forward(width_model, xb)[:, j]
            out, f_cache = forward_cached(mean_model, xb)
            lf, g_mean = loss_f_with_mean_grad(yb, out[:, 0], delta, config.tau)
            adam_step(mean_model, backward(mean_model, xb, g_mean[:, None], f_cache), opt_mean)
        except FloatingPointError as exc:
            raise TrainingDiverged(t, str(exc)) from exc

        history.record(t, alpha, lg, lf)
        if val is not None and (t % config.val_every == 0 or t == config.iterations):
            pred = predict_intervals(mean_model, width_model, val.features, levels)
            scale = target_scale(val.standardization)
            v_rmse = float(np.sqrt(np.mean((scale * (pred.mean - val.targets)) ** 2)))
            history.val_points[t] = (v_rmse, _hard_ece(val.targets, pred, levels))

    return mean_model, width_model, history
