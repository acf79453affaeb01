"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 model fit error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .config import RunConfig, load_config
from .data import make_split, synthesize
from .errors import (
    AirDemandError,
    ConfigError,
    DataError,
    EmptyFile,
    MissingColumn,
    ModelFitError,
    NonNumericCell,
    UnreadableFile,
)
from .models import MODEL_KEYS
from .pipeline import NOTICE_TOO_FEW, fit_all, load_dataset, run_pipeline
from .report import render_anova, render_posthoc, render_report
from .stats import compare_models

EXIT_CONFIG, EXIT_DATA, EXIT_FIT = 2, 3, 4


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--synthetic", action="store_true", help="use generated data instead of a CSV")
    p.add_argument("--seed", type=int, help="seed for data generation and splitting")
    p.add_argument("--out", help="output directory")
    p.add_argument("--alpha", type=float, help="significance level for starring p-values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="airdemand", description="Air-travel demand model comparison")
    sub = parser.add_subparsers(dest="verb", required=True)

    _common(sub.add_parser("run", help="fit every enabled model, evaluate, compare, write reports"))
    p = sub.add_parser("fit", help="fit one model and print its record")
    p.add_argument("model", choices=MODEL_KEYS)
    _common(p)
    _common(sub.add_parser("evaluate", help="fit and evaluate without the statistical comparison"))

    p = sub.add_parser("compare", help="ANOVA and post hoc tests from a predictions CSV")
    p.add_argument("predictions", help="CSV with quarter,subset,actual,<model>... columns")
    p.add_argument("--out", help="output directory")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--ttest", choices=("pooled", "welch"), default="pooled")

    p = sub.add_parser("synth", help="write a synthetic dataset as CSV")
    p.add_argument("path")
    p.add_argument("--n", type=int, default=42)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sd in target units")
    p.add_argument("--quadratic", type=float, default=0.0, help="size of a squared term on the first predictor")
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    return cfg.with_overrides(seed=args.seed, out=args.out, alpha=args.alpha, synthetic=args.synthetic)


def _cmd_run(args) -> int:
    cfg = _run_config(args)
    report, comparison = run_pipeline(cfg)
    if comparison.notice:
        print(comparison.notice)
    print(f"wrote {len(report.evaluations)} model reports to {cfg.report.out}")
    return 0


def _cmd_fit(args) -> int:
    cfg = _run_config(args)
    cfg = replace(cfg, enabled=(args.model,), models={k: v for k, v in cfg.models.items() if k == args.model})
    ds = load_dataset(cfg)
    plan = make_split(ds.n, cfg.split.proportions, cfg.split_seed, cfg.split.mode)
    (ev,) = fit_all(cfg, ds, plan)
    record = ev.model.to_record()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"model_{ev.key}.txt").write_text(record, encoding="utf-8")
    else:
        sys.stdout.write(record)
    for scope, value in ev.rmse.items():
        print(f"rmse[{scope}] = {'-' if value is None else repr(value)}")
    return 0


def _cmd_evaluate(args) -> int:
    cfg = _run_config(args)
    report, _ = run_pipeline(cfg, write=False)
    render_report(report, None, cfg.report.out, cfg.report.formats)
    print(f"wrote evaluation for {len(report.evaluations)} models to {cfg.report.out}")
    return 0


def read_predictions(path: str | Path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise UnreadableFile(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise EmptyFile(f"{path}: no prediction rows")
    header = rows[0]
    if header[:3] != ["quarter", "subset", "actual"]:
        raise MissingColumn("actual", "expected header quarter,subset,actual,<models...>")
    values = []
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise MissingColumn(header[-1], f"row {r} has {len(row)} cells")
        try:
            values.append([float(c) for c in row[2:]])
        except ValueError:
            raise NonNumericCell(r, "?", ",".join(row[2:])) from None
    arr = np.array(values)
    return arr[:, 0], {name: arr[:, j + 1] for j, name in enumerate(header[3:])}


def _cmd_compare(args) -> int:
    actual, preds = read_predictions(args.predictions)
    errors = {name: (actual - p) ** 2 for name, p in preds.items()}
    if len(errors) < 2:
        print(NOTICE_TOO_FEW)
        return 0
    c = compare_models(errors, args.alpha, args.ttest)
    anova = render_anova(c.anova, len(errors), actual.size)
    posthoc = render_posthoc(c.pairwise)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "anova.txt").write_text(anova, encoding="utf-8")
        (out / "posthoc.txt").write_text(posthoc, encoding="utf-8")
    else:
        sys.stdout.write(anova + "\n" + posthoc)
    return 0


def _cmd_synth(args) -> int:
    ds, _ = synthesize(args.n, args.seed, args.noise, args.quadratic)
    ds.to_csv(args.path)
    print(f"wrote {ds.n} rows to {args.path}")
    return 0


COMMANDS = {"run": _cmd_run, "fit": _cmd_fit, "evaluate": _cmd_evaluate, "compare": _cmd_compare, "synth": _cmd_synth}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelFitError as exc:
        print(f"model fit error ({exc.model}): {exc.cause}", file=sys.stderr)
        return EXIT_FIT
    except AirDemandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
