"""Command-line workflows: train, evaluate, compare, pdp, calibration-curve.

Config precedence is CLI flags > JSON config file > built-in defaults, and
the effective configuration is echoed into every output directory. All
numeric artifacts are byte-identical across reruns with the same config and
seed. Exit codes: 0 success, 1 usage/config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import fileio, svg
from .baselines import (BaselineConfig, gaussian_intervals, predict_hnn,
                        predict_mc_dropout, train_hnn, train_mse,
                        train_mse_dropout)
from .dataio import Dataset, Standardization, load_csv, make_splits
from .dataio import standardize as standardize_datasets
from .lbc import (CalibrationLevels, LbcConfig, TrainingDiverged,
                  predict_intervals, train_lbc)
from .metrics import build_report, curve_csv
from .nn_core import forward, load_checkpoint, save_checkpoint
from .pdp import partial_dependence, partial_dependence_with_intervals, to_original_units

METHODS = ("lbc", "mse", "hnn", "mc_dropout")
OUT_ROOT_ENV = "LBCREG_OUT_ROOT"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class ConfigError(Exception):
    """Invalid configuration; carries every problem found, not just the first."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class RunConfig:
    """Everything a run needs; defaults reproduce the evaluation protocol."""

    data: str = ""
    target: str = ""
    method: str = "lbc"
    seed: int = 0
    folds: int = 5
    test_fraction: float = 0.2
    iterations: int = 1000
    levels: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    lambda1: float = 0.1
    lambda2: float = 0.1
    tau: float = 0.05
    lr_mean: float = 5e-5
    lr_width: float = 1e-4
    sharpness: float = 50.0
    hidden_dims: tuple[int, ...] = (64, 64, 64, 64, 64)
    warm_start_iterations: int = 0
    dropout_p: float = 0.1
    mc_passes: int = 50
    delimiter: str = ","
    out: str = ""
    jobs: int = 1

    def validate(self) -> list[str]:
        problems = []
        if not self.data:
            problems.append("--data is required")
        if not self.target:
            problems.append("--target is required")
        if self.method not in METHODS:
            problems.append(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.folds < 1:
            problems.append(f"--folds must be >= 1, got {self.folds}")
        if not 0.0 < self.test_fraction < 1.0:
            problems.append(f"--test-fraction must be in (0, 1), got {self.test_fraction}")
        if self.jobs < 1:
            problems.append(f"--jobs must be >= 1, got {self.jobs}")
        try:
            CalibrationLevels(self.levels)
        except ValueError as exc:
            problems.append(str(exc))
        problems.extend(self.lbc_config(0).validate())
        problems.extend(self.baseline_config(0).validate())
        return problems

    def lbc_config(self, seed: int) -> LbcConfig:
        return LbcConfig(
            lambda1=self.lambda1, lambda2=self.lambda2, tau=self.tau,
            iterations=self.iterations, lr_mean=self.lr_mean,
            lr_width=self.lr_width, sharpness=self.sharpness,
            hidden_dims=tuple(self.hidden_dims),
            warm_start_iterations=self.warm_start_iterations, seed=seed)

    def baseline_config(self, seed: int) -> BaselineConfig:
        return BaselineConfig(
            iterations=self.iterations, learning_rate=self.lr_mean,
            hidden_dims=tuple(self.hidden_dims), dropout_p=self.dropout_p,
            mc_passes=self.mc_passes, seed=seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["levels"] = [float(a) for a in self.levels]
        d["hidden_dims"] = [int(h) for h in self.hidden_dims]
        return d


def _merge_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        doc = fileio.read_json(args.config)
        known = set(RunConfig.__dataclass_fields__)
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError([f"unknown config file keys: {', '.join(unknown)}"])
        for key in ("levels", "hidden_dims"):
            if key in doc:
                doc[key] = tuple(doc[key])
        cfg = replace(cfg, **doc)
    overrides = {}
    for name in RunConfig.__dataclass_fields__:
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return replace(cfg, **overrides)


def _parse_levels(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad levels {text!r}: {exc}") from exc


def _fold_seed(seed: int, fold: int, purpose: int = 0) -> int:
    """Independent integer streams per (seed, fold, purpose)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(fold, purpose))
    return int(ss.generate_state(1)[0])


def _resolve_out(cfg: RunConfig) -> Path:
    if cfg.out:
        return Path(cfg.out)
    root = os.environ.get(OUT_ROOT_ENV, "runs")
    return Path(root) / f"{Path(cfg.data).stem}_{cfg.method}_seed{cfg.seed}"


def _fold_partitions(plan, folds: int):
    if folds == 1:
        return [(plan.train_indices, plan.test_indices)]
    return [(plan.fold_train(j), plan.fold_test(j)) for j in range(folds)]


def _train_one_fold(cfg: RunConfig, dataset: Dataset, train_idx, test_idx,
                    fold: int, fold_dir: Path, levels: CalibrationLevels) -> dict:
    train_s, [test_s] = standardize_datasets(dataset.subset(train_idx),
                                             [dataset.subset(test_idx)])
    stats = train_s.standardization
    seed = _fold_seed(cfg.seed, fold)
    extra = {"standardization": stats.to_dict(), "fold": fold}

    try:
        if cfg.method == "lbc":
            mean_model, width_model, history = train_lbc(
                train_s, cfg.lbc_config(seed), levels)
            pred = predict_intervals(mean_model, width_model, test_s.features, levels)
            report = build_report(test_s.targets, pred, pred.mean, levels, stats)
            save_checkpoint(mean_model, fold_dir / "checkpoint_mean.json",
                            method="lbc", seed=seed, extra=extra)
            save_checkpoint(width_model, fold_dir / "checkpoint_width.json",
                            method="lbc", seed=seed,
                            extra={**extra, "levels": [float(a) for a in levels.levels]})
        elif cfg.method == "mse":
            model, history = train_mse(train_s, cfg.baseline_config(seed))
            mean = forward(model, test_s.features)[:, 0]
            report = build_report(test_s.targets, None, mean, levels, stats)
            save_checkpoint(model, fold_dir / "checkpoint.json",
                            method="mse", seed=seed, extra=extra)
        elif cfg.method == "hnn":
            model, history = train_hnn(train_s, cfg.baseline_config(seed))
            gp = predict_hnn(model, test_s.features)
            pred = gaussian_intervals(gp, levels)
            report = build_report(test_s.targets, pred, pred.mean, levels, stats)
            save_checkpoint(model, fold_dir / "checkpoint.json",
                            method="hnn", seed=seed, extra=extra)
        else:  # mc_dropout
            model, history = train_mse_dropout(train_s, cfg.baseline_config(seed))
            eval_seed = _fold_seed(cfg.seed, fold, purpose=1)
            gp = predict_mc_dropout(model, test_s.features, cfg.mc_passes,
                                    eval_seed, dropout_p=cfg.dropout_p)
            pred = gaussian_intervals(gp, levels)
            report = build_report(test_s.targets, pred, pred.mean, levels, stats)
            save_checkpoint(model, fold_dir / "checkpoint.json",
                            method="mc_dropout", seed=seed,
                            extra={**extra, "dropout_p": cfg.dropout_p,
                                   "mc_passes": cfg.mc_passes,
                                   "mc_eval_seed": eval_seed})
    except TrainingDiverged as exc:
        raise TrainingDiverged(exc.iteration, f"fold {fold}: {exc}") from exc

    history.to_csv(fold_dir / "history.csv")
    report.write_json(fold_dir / "report.json")
    return report.to_dict()


def _aggregate(values) -> dict | None:
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    arr = np.asarray(vals, dtype=np.float64)
    return {"mean": float(arr.mean()), "std": float(arr.std())}


def train_run(cfg: RunConfig) -> Path:
    """Full training workflow; returns the output directory."""
    problems = cfg.validate()
    if problems:
        raise ConfigError(problems)
    out_dir = _resolve_out(cfg)
    levels = CalibrationLevels(cfg.levels)
    dataset, load_report = load_csv(cfg.data, cfg.target, delimiter=cfg.delimiter)
    plan = make_splits(dataset.n_samples, cfg.test_fraction, max(cfg.folds, 2), cfg.seed)
    partitions = _fold_partitions(plan, cfg.folds)

    cfg_echo = replace(cfg, out=str(out_dir))
    fileio.write_json(out_dir / "effective_config.json", cfg_echo.to_dict(),
                      schema="run_config")
    fileio.write_json(out_dir / "load_report.json", load_report.to_dict(),
                      schema="load_report")

    def run_fold(j: int) -> dict:
        train_idx, test_idx = partitions[j]
        return _train_one_fold(cfg, dataset, train_idx, test_idx, j,
                               out_dir / f"fold_{j}", levels)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(run_fold, range(len(partitions))))
    else:
        reports = [run_fold(j) for j in range(len(partitions))]

    summary = {
        "method": cfg.method,
        "data": cfg.data,
        "target": cfg.target,
        "seed": cfg.seed,
        "folds": cfg.folds,
        "test_fraction": cfg.test_fraction,
        "levels": [float(a) for a in levels.levels],
        "per_fold": [
            {"fold": j, "report": rep, "n_train": int(len(partitions[j][0]))}
            for j, rep in enumerate(reports)
        ],
        "aggregate": {
            "rmse": _aggregate([r["rmse"] for r in reports]),
            "ece_mean": _aggregate([r["ece_mean"] for r in reports]),
            "ece_sum": _aggregate([r["ece_sum"] for r in reports]),
        },
    }
    fileio.write_json(out_dir / "summary.json", summary, schema="summary")
    return out_dir


# ---------------------------------------------------------------------------
# artifact reloading helpers
# ---------------------------------------------------------------------------

def _load_run_config(run_dir: Path) -> RunConfig:
    doc = fileio.read_json(run_dir / "effective_config.json")
    doc["levels"] = tuple(doc["levels"])
    doc["hidden_dims"] = tuple(doc.get("hidden_dims", (64, 64, 64, 64, 64)))
    return RunConfig(**doc)


def _apply_stats(dataset: Dataset, stats: Standardization) -> Dataset:
    feats = (dataset.features - stats.feature_mean) / stats.feature_std
    if stats.constant_features:
        feats[:, stats.constant_features] = 0.0
    targs = (dataset.targets - stats.target_mean) / stats.target_std
    return Dataset(feats, targs, list(dataset.feature_names), stats)


def _fold_intervals(cfg: RunConfig, fold_dir: Path, test_s: Dataset,
                    levels: CalibrationLevels):
    """(IntervalPrediction | None, mean) for a stored fold on standardized data."""
    if cfg.method == "lbc":
        mean_model, _ = load_checkpoint(fold_dir / "checkpoint_mean.json")
        width_model, _ = load_checkpoint(fold_dir / "checkpoint_width.json")
        pred = predict_intervals(mean_model, width_model, test_s.features, levels)
        return pred, pred.mean
    model, meta = load_checkpoint(fold_dir / "checkpoint.json")
    if cfg.method == "mse":
        return None, forward(model, test_s.features)[:, 0]
    if cfg.method == "hnn":
        gp = predict_hnn(model, test_s.features)
    else:
        extra = meta["extra"]
        gp = predict_mc_dropout(model, test_s.features, extra["mc_passes"],
                                extra["mc_eval_seed"], dropout_p=extra["dropout_p"])
    pred = gaussian_intervals(gp, levels)
    return pred, pred.mean


def _rebuild_folds(cfg: RunConfig, data_path: str):
    """Dataset plus (train_idx, test_idx) partitions matching the train run."""
    dataset, _ = load_csv(data_path, cfg.target, delimiter=cfg.delimiter)
    plan = make_splits(dataset.n_samples, cfg.test_fraction, max(cfg.folds, 2), cfg.seed)
    return dataset, _fold_partitions(plan, cfg.folds)


def _fold_stats(fold_dir: Path, method: str) -> Standardization:
    name = "checkpoint_mean.json" if method == "lbc" else "checkpoint.json"
    _, meta = load_checkpoint(fold_dir / name)
    return Standardization.from_dict(meta["extra"]["standardization"])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_train(args) -> int:
    cfg = _merge_config(args)
    out_dir = train_run(cfg)
    print(f"wrote {out_dir}/summary.json")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    run_dir = Path(args.run)
    cfg = _load_run_config(run_dir)
    data_path = args.data or cfg.data
    levels = CalibrationLevels(cfg.levels)
    dataset, partitions = _rebuild_folds(cfg, data_path)
    per_fold = []
    for j in range(len(partitions)):
        fold_dir = run_dir / f"fold_{j}"
        stats = _fold_stats(fold_dir, cfg.method)
        test_s = _apply_stats(dataset.subset(partitions[j][1]), stats)
        pred, mean = _fold_intervals(cfg, fold_dir, test_s, levels)
        report = build_report(test_s.targets, pred, mean, levels, stats)
        per_fold.append({"fold": j, "report": report.to_dict(),
                         "n_train": int(len(partitions[j][0]))})
    doc = {
        "method": cfg.method, "data": data_path, "target": cfg.target,
        "seed": cfg.seed, "folds": cfg.folds, "test_fraction": cfg.test_fraction,
        "levels": [float(a) for a in levels.levels],
        "per_fold": per_fold,
        "aggregate": {
            "rmse": _aggregate([f["report"]["rmse"] for f in per_fold]),
            "ece_mean": _aggregate([f["report"]["ece_mean"] for f in per_fold]),
            "ece_sum": _aggregate([f["report"]["ece_sum"] for f in per_fold]),
        },
    }
    out = Path(args.out) if args.out else run_dir
    fileio.write_json(out / "evaluation.json", doc, schema="summary")
    print(f"wrote {out / 'evaluation.json'}")
    return EXIT_OK


def _fmt_cell(agg: dict | None, digits: int = 4) -> str:
    if agg is None:
        return "-"
    return f"{agg['mean']:.{digits}g} ± {agg['std']:.{digits}g}"


def cmd_compare(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ConfigError([f"unknown method {m!r}" for m in unknown])
    base = _merge_config(args)
    root = Path(base.out) if base.out else _resolve_out(replace(base, method="compare"))
    rows = []
    failures = 0
    for method in methods:
        run_dir = root / method
        cfg = replace(base, method=method, out=str(run_dir))
        try:
            if not (run_dir / "summary.json").exists():
                train_run(cfg)
            summary = fileio.read_json(run_dir / "summary.json")
            rows.append((method, summary["aggregate"], None))
        except (ConfigError, TrainingDiverged, ValueError, OSError) as exc:
            failures += 1
            rows.append((method, None, str(exc)))

    csv_rows = []
    md = ["| method | RMSE | ECE (mean over levels) | ECE (sum over levels) |",
          "|---|---|---|---|"]
    for method, agg, error in rows:
        if agg is None:
            csv_rows.append([method, "", "", "", "", "", "", f"error: {error}"])
            md.append(f"| {method} | error: {error} | | |")
            continue
        cells = []
        for key in ("rmse", "ece_mean", "ece_sum"):
            if agg[key] is None:
                cells += ["", ""]
            else:
                cells += [agg[key]["mean"], agg[key]["std"]]
        csv_rows.append([method] + cells + [""])
        md.append(f"| {method} | {_fmt_cell(agg['rmse'])} | "
                  f"{_fmt_cell(agg['ece_mean'])} | {_fmt_cell(agg['ece_sum'])} |")

    fileio.write_csv(root / "table.csv",
                     ["method", "rmse_mean", "rmse_std", "ece_mean_mean",
                      "ece_mean_std", "ece_sum_mean", "ece_sum_std", "note"],
                     csv_rows)
    fileio.atomic_write_text(root / "table.md", "\n".join(md) + "\n")
    print("\n".join(md))
    print(f"wrote {root / 'table.csv'}")
    return EXIT_OK if failures < len(methods) else EXIT_RUNTIME


def cmd_pdp(args) -> int:
    run_dir = Path(args.run)
    cfg = _load_run_config(run_dir)
    data_path = args.data or cfg.data
    levels = CalibrationLevels(cfg.levels)
    dataset, partitions = _rebuild_folds(cfg, data_path)
    if args.feature not in dataset.feature_names:
        raise ConfigError([f"unknown feature {args.feature!r}; "
                           f"available: {', '.join(dataset.feature_names)}"])
    f_idx = dataset.feature_names.index(args.feature)
    fold = args.fold
    fold_dir = run_dir / f"fold_{fold}"
    stats = _fold_stats(fold_dir, cfg.method)
    background = _apply_stats(dataset.subset(partitions[fold][0]), stats)

    out = Path(args.out) if args.out else run_dir
    if cfg.method == "lbc":
        mean_model, _ = load_checkpoint(fold_dir / "checkpoint_mean.json")
        width_model, _ = load_checkpoint(fold_dir / "checkpoint_width.json")
        result = partial_dependence_with_intervals(
            mean_model, width_model, background, f_idx, levels,
            grid_size=args.grid_size)
        result = to_original_units(result, stats, f_idx)
        result.to_csv(out / f"pdp_{args.feature}.csv")
        bands = [(f"{a:g} level", result.lower_curves[i], result.upper_curves[i])
                 for i, a in reversed(list(enumerate(result.levels)))]
        chart = svg.line_chart(result.grid, [("expected prediction", result.mean_curve)],
                               bands, x_label=args.feature, y_label=cfg.target,
                               title=f"Partial dependence: {args.feature}")
    else:
        name = "checkpoint.json"
        model, _ = load_checkpoint(fold_dir / name)
        grid_s, curve_s = partial_dependence(model, background, f_idx,
                                             grid_size=args.grid_size)
        grid = grid_s * stats.feature_std[f_idx] + stats.feature_mean[f_idx]
        curve = curve_s * stats.target_std + stats.target_mean
        fileio.write_csv(out / f"pdp_{args.feature}.csv", ["grid", "mean"],
                         [[float(g), float(c)] for g, c in zip(grid, curve)])
        chart = svg.line_chart(grid, [("expected prediction", curve)], [],
                               x_label=args.feature, y_label=cfg.target,
                               title=f"Partial dependence: {args.feature}")
    svg.save_chart(out / f"pdp_{args.feature}.svg", chart)
    print(f"wrote {out / f'pdp_{args.feature}.csv'} and .svg")
    return EXIT_OK


def cmd_calibration_curve(args) -> int:
    run_dir = Path(args.run)
    cfg = _load_run_config(run_dir)
    if cfg.method == "mse":
        raise ConfigError(["method 'mse' produces no intervals; "
                           "no calibration curve is defined"])
    data_path = args.data or cfg.data
    levels = CalibrationLevels(cfg.levels)
    dataset, partitions = _rebuild_folds(cfg, data_path)
    curves = {}
    for j in range(len(partitions)):
        fold_dir = run_dir / f"fold_{j}"
        stats = _fold_stats(fold_dir, cfg.method)
        test_s = _apply_stats(dataset.subset(partitions[j][1]), stats)
        pred, _ = _fold_intervals(cfg, fold_dir, test_s, levels)
        lo, hi = pred.lower(), pred.upper()
        inside = (lo <= test_s.targets[:, None]) & (test_s.targets[:, None] <= hi)
        curves[f"fold_{j}"] = [float(c) for c in inside.mean(axis=0)]
    mean_curve = [float(np.mean([curves[k][i] for k in curves]))
                  for i in range(len(levels))]
    curves["mean"] = mean_curve

    out = Path(args.out) if args.out else run_dir
    curve_csv(out / "calibration_curve.csv", levels, curves)
    alphas = np.asarray(levels.levels)
    chart = svg.line_chart(alphas, [("observed coverage", np.asarray(mean_curve))],
                           [], diagonal=True, x_label="expected confidence level",
                           y_label="observed coverage", title="Calibration")
    svg.save_chart(out / "calibration_curve.svg", chart)
    print(f"wrote {out / 'calibration_curve.csv'} and .svg")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--data", help="path to the CSV dataset")
    p.add_argument("--target", help="target column name or index")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--seed", type=int)
    p.add_argument("--folds", type=int, help="cross-validation folds (1 = holdout)")
    p.add_argument("--test-fraction", dest="test_fraction", type=float)
    p.add_argument("--iterations", type=int)
    p.add_argument("--levels", type=_parse_levels,
                   help="comma-separated calibration levels, e.g. 0.1,0.3,0.5,0.7,0.9")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--lr-mean", dest="lr_mean", type=float)
    p.add_argument("--lr-width", dest="lr_width", type=float)
    p.add_argument("--sharpness", type=float)
    p.add_argument("--warm-start", dest="warm_start_iterations", type=int)
    p.add_argument("--dropout-p", dest="dropout_p", type=float)
    p.add_argument("--mc-passes", dest="mc_passes", type=int)
    p.add_argument("--delimiter")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help=f"output directory (default under ${OUT_ROOT_ENV} or ./runs)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lbcreg",
                     description="Calibration-driven regression toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one method with k-fold CV")
    _add_config_flags(p_train)
    p_train.set_defaults(fn=cmd_train)

    p_eval = sub.add_parser("evaluate", help="re-evaluate stored checkpoints")
    p_eval.add_argument("--run", required=True, help="training output directory")
    p_eval.add_argument("--data", help="override the dataset path")
    p_eval.add_argument("--out")
    p_eval.set_defaults(fn=cmd_evaluate)

    p_cmp = sub.add_parser("compare", help="side-by-side table over methods")
    p_cmp.add_argument("--methods", default="lbc,mse,hnn,mc_dropout",
                       help="comma-separated subset of: " + ",".join(METHODS))
    _add_config_flags(p_cmp)
    p_cmp.set_defaults(fn=cmd_compare)

    p_pdp = sub.add_parser("pdp", help="partial dependence curve with bands")
    p_pdp.add_argument("--run", required=True)
    p_pdp.add_argument("--feature", required=True)
    p_pdp.add_argument("--fold", type=int, default=0)
    p_pdp.add_argument("--grid-size", dest="grid_size", type=int, default=50)
    p_pdp.add_argument("--data")
    p_pdp.add_argument("--out")
    p_pdp.set_defaults(fn=cmd_pdp)

    p_cal = sub.add_parser("calibration-curve", help="observed vs expected coverage")
    p_cal.add_argument("--run", required=True)
    p_cal.add_argument("--data")
    p_cal.add_argument("--out")
    p_cal.set_defaults(fn=cmd_calibration_curve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDiverged as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
