"""Experiment runner: screening-rate grids, oracle validation, lambda_max.

Exit codes: 0 success, 1 usage error, 2 data error, 3 solver failure,
4 oracle violation.
"""

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle, screening, solver
from .ballmax import BallmaxError
from .data import DataError, load_dense_features, parse_libsvm, prepare_dataset
from .models import ModelError
from .screening import ScreeningError, WeightBall
from .solver import ConvergenceError

CSV_HEADER = "dataset,task,lambda,a,S,screened,total,rate,status"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_SOLVER = 3
EXIT_VIOLATION = 4

TASK_SAMPLES = "drsss"
TASK_FEATURES = "drsfs"


class UsageError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    data: str
    task: str
    lambda_grid: object
    a_grid: list
    gap_tol: float = 1e-10
    seed: int = 0
    out: str = None
    label_map: dict = None
    drop_zero_features: bool = False
    dense_csv: bool = False
    label_col: str = "label"
    allow_wide: bool = False
    samples: int = 200
    retrain_gap_tol: float = 1e-11
    force: bool = False

    def __post_init__(self):
        if self.task not in (TASK_SAMPLES, TASK_FEATURES):
            raise UsageError(f"unknown task {self.task!r}")
        if not self.a_grid:
            raise UsageError("empty a grid")
        if not self.allow_wide:
            for a in self.a_grid:
                if not (0.9 - 1e-12 <= a <= 1.1 + 1e-12):
                    raise UsageError(
                        f"a={a} outside [0.9, 1.1]; pass --allow-wide to permit"
                    )


def _parse_fraction(tok):
    tok = tok.strip()
    if "/" in tok:
        num, _, den = tok.partition("/")
        return float(num) / float(den)
    return float(tok)


def parse_lambda_grid(text):
    """Either an anchored exponent ladder or an explicit value list.

    ``n:0:-0.5:-3`` means anchor * 10**e for e = 0, -0.5, ..., -3 with the
    anchor resolved to the sample count; ``lmax:...`` anchors at the
    computed lambda_max.  Anything else is a comma-separated float list.
    """
    text = text.strip()
    parts = text.split(":")
    if parts[0] in ("n", "lmax") and len(parts) == 4:
        start, step, stop = (_parse_fraction(p) for p in parts[1:])
        if step == 0.0 or (stop - start) * step < 0.0:
            raise UsageError(f"bad exponent ladder {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        exps = [start + k * step for k in range(count)]
        if not exps:
            raise UsageError(f"empty lambda grid {text!r}")
        return (parts[0], exps)
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"cannot parse lambda grid {text!r}") from None
    if not values or any(v <= 0.0 for v in values):
        raise UsageError(f"lambda grid must be positive and nonempty: {text!r}")
    return ("explicit", values)


def parse_a_grid(text):
    """``start:stop:step`` inclusive ladder, or a comma-separated list."""
    text = text.strip()
    parts = text.split(":")
    if len(parts) == 3:
        start, stop, step = (float(p) for p in parts)
        if step <= 0.0 or stop < start:
            raise UsageError(f"bad a grid {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(count)]
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"cannot parse a grid {text!r}") from None
    if not values:
        raise UsageError("empty a grid")
    return values


def parse_label_map(text):
    """``old=new`` pairs, e.g. ``0=-1,1=1``."""
    out = {}
    for pair in text.split(","):
        pair = pair.strip()
        if not pair:
            continue
        old, sep, new = pair.partition("=")
        if not sep:
            raise UsageError(f"bad label-map entry {pair!r}")
        try:
            out[float(old)] = float(new)
        except ValueError:
            raise UsageError(f"bad label-map entry {pair!r}") from None
    if not out:
        raise UsageError("empty label map")
    return out


def load_config_dataset(config):
    path = Path(config.data)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if config.dense_csv:
        return load_dense_features(text, label_column=config.label_col)
    samples = parse_libsvm(text)
    return prepare_dataset(
        samples,
        label_map=config.label_map,
        drop_zero_features=config.drop_zero_features,
    )


def resolve_lambdas(config, dataset):
    kind, values = config.lambda_grid
    if kind == "explicit":
        return list(values)
    if kind == "n":
        anchor = float(dataset.n)
    else:
        anchor = solver.lambda_max(dataset, np.ones(dataset.n))
    return [anchor * 10.0**e for e in values]


def _fmt(x):
    return f"{x:.10g}"


def _train(config, dataset, lam, w):
    tol = config.gap_tol * max(1.0, float(np.sum(w)))
    if config.task == TASK_SAMPLES:
        return solver.train_hinge_l2(dataset, w, lam, gap_tol=tol,
                                     seed=config.seed)
    return solver.train_squared_hinge_l1(dataset, w, lam, gap_tol=tol)


def _screen(config, solution, dataset, ball):
    if config.task == TASK_SAMPLES:
        return screening.robust_screen_samples(solution, dataset, ball)
    return screening.robust_screen_features(solution, dataset, ball)


def run_grid(config):
    """One row per (lambda, a) cell; the reference is trained once per lambda.

    Returns (rows, solver_failed).  Cells whose ball cannot stay in the
    nonnegative orthant certify nothing and are emitted with zero rate and
    status ball_invalid.
    """
    dataset = load_config_dataset(config)
    name = Path(config.data).stem
    lambdas = resolve_lambdas(config, dataset)
    w = np.ones(dataset.n)
    total = dataset.n if config.task == TASK_SAMPLES else dataset.d - 1
    sqrt_npos = math.sqrt(dataset.n_pos)
    rows = []
    solver_failed = False
    for lam in lambdas:
        try:
            solution = _train(config, dataset, lam, w)
        except ConvergenceError:
            solver_failed = True
            for a in config.a_grid:
                s = sqrt_npos * abs(a - 1.0)
                rows.append(
                    f"{name},{config.task},{_fmt(lam)},{_fmt(a)},{_fmt(s)},"
                    f",{total},,solver_failed"
                )
            continue
        for a in config.a_grid:
            s = sqrt_npos * abs(a - 1.0)
            try:
                ball = WeightBall(w, s)
                if config.task == TASK_FEATURES and s >= float(np.min(w)):
                    raise ScreeningError("ball touches the zero-weight boundary")
                report = _screen(config, solution, dataset, ball)
            except ScreeningError:
                rows.append(
                    f"{name},{config.task},{_fmt(lam)},{_fmt(a)},{_fmt(s)},"
                    f"0,{total},{_fmt(0.0)},ball_invalid"
                )
                continue
            k = int(np.sum(report.screened))
            rows.append(
                f"{name},{config.task},{_fmt(lam)},{_fmt(a)},{_fmt(s)},"
                f"{k},{total},{_fmt(k / total if total else 0.0)},ok"
            )
    return rows, solver_failed


def validate_oracle(config):
    """Retraining oracle over the grid; returns (lines, total violations)."""
    dataset = load_config_dataset(config)
    if dataset.n * config.samples > 10**6 and not config.force:
        raise UsageError(
            f"n * samples = {dataset.n * config.samples} exceeds 1e6; "
            "pass --force to run anyway"
        )
    lambdas = resolve_lambdas(config, dataset)
    w = np.ones(dataset.n)
    lines = []
    total_violations = 0
    for lam in lambdas:
        solution = _train(config, dataset, lam, w)
        for a in config.a_grid:
            s = math.sqrt(dataset.n_pos) * abs(a - 1.0)
            ball = WeightBall(w, s)
            report = _screen(config, solution, dataset, ball)
            if config.task == TASK_SAMPLES:
                check = oracle.verify_sample_screening(
                    dataset, lam, ball, report.screened,
                    count=config.samples,
                    retrain_gap_tol=config.retrain_gap_tol,
                    seed=config.seed,
                )
            else:
                check = oracle.verify_feature_screening(
                    dataset, lam, ball, report.screened,
                    count=config.samples,
                    retrain_gap_tol=config.retrain_gap_tol,
                    seed=config.seed,
                )
            total_violations += check.violations
            lines.append(
                f"lambda={_fmt(lam)} a={_fmt(a)} S={_fmt(s)} "
                f"screened={int(np.sum(report.screened))}/{report.screened.size} "
                f"violations={check.violations} "
                f"max_screened_magnitude={_fmt(check.max_screened_magnitude)}"
            )
    return lines, total_violations


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="drscreen",
        description="Robust screening experiments for weighted SVMs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_task=True):
        p.add_argument("--data", required=True, help="input data file")
        if with_task:
            p.add_argument("--task", required=True,
                           choices=[TASK_SAMPLES, TASK_FEATURES])
            p.add_argument("--lambda-grid", required=True,
                           help="n:0:-0.5:-3 | lmax:0:-1/3:-2 | explicit list")
            p.add_argument("--a-grid", default="0.9:1.1:0.005")
            p.add_argument("--gap-tol", type=float, default=1e-10,
                           help="relative duality-gap tolerance for training")
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--allow-wide", action="store_true",
                           help="permit a values outside [0.9, 1.1]")
        p.add_argument("--label-map", default=None, help="e.g. 0=-1,1=1")
        p.add_argument("--drop-zero-features", action="store_true")
        p.add_argument("--dense-csv", action="store_true",
                       help="input is a dense feature CSV, not LIBSVM text")
        p.add_argument("--label-col", default="label")

    p_run = sub.add_parser("run", help="emit the screening-rate CSV grid")
    add_common(p_run)
    p_run.add_argument("--out", default=None, help="output CSV path (default stdout)")

    p_val = sub.add_parser("validate", help="certify a grid by retraining")
    add_common(p_val)
    p_val.add_argument("--samples", type=int, default=200,
                       help="weights sampled from the ball per cell")
    p_val.add_argument("--retrain-gap-tol", type=float, default=1e-11,
                       help="absolute duality gap for oracle retraining")
    p_val.add_argument("--force", action="store_true",
                       help="skip the n*samples <= 1e6 guard")

    p_lm = sub.add_parser("lambda-max", help="print lambda_max for the data")
    add_common(p_lm, with_task=False)
    return parser


def _config_from_args(args):
    return ExperimentConfig(
        data=args.data,
        task=args.task,
        lambda_grid=parse_lambda_grid(args.lambda_grid),
        a_grid=parse_a_grid(args.a_grid),
        gap_tol=args.gap_tol,
        seed=args.seed,
        label_map=parse_label_map(args.label_map) if args.label_map else None,
        drop_zero_features=args.drop_zero_features,
        dense_csv=args.dense_csv,
        label_col=args.label_col,
        allow_wide=args.allow_wide,
        samples=getattr(args, "samples", 200),
        retrain_gap_tol=getattr(args, "retrain_gap_tol", 1e-11),
        force=getattr(args, "force", False),
    )


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0

    try:
        if args.command == "run":
            config = _config_from_args(args)
            rows, solver_failed = run_grid(config)
            text = "\n".join([CSV_HEADER] + rows) + "\n"
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
            return EXIT_SOLVER if solver_failed else EXIT_OK
        if args.command == "validate":
            config = _config_from_args(args)
            lines, violations = validate_oracle(config)
            for line in lines:
                print(line)
            print(f"total violations: {violations}")
            return EXIT_VIOLATION if violations > 0 else EXIT_OK
        # lambda-max
        label_map = parse_label_map(args.label_map) if args.label_map else None
        path = Path(args.data)
        try:
            text = path.read_text()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
        if args.dense_csv:
            dataset = load_dense_features(text, label_column=args.label_col)
        else:
            dataset = prepare_dataset(
                parse_libsvm(text),
                label_map=label_map,
                drop_zero_features=args.drop_zero_features,
            )
        print(_fmt(solver.lambda_max(dataset, np.ones(dataset.n))))
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConvergenceError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ModelError, ScreeningError, BallmaxError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
