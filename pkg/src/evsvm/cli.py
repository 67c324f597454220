"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .belief import Frame
from .data import (Dataset, benchmark_spec, dataset_to_csv, generate_synthetic, load_dataset,
                   load_synth_spec, save_dataset, train_test_split)
from .decision import DEFAULT_R
from .errors import ConvergenceError, DataError, DegenerateMassError, TotalConflictError
from .evaluation import RULES, RunConfig, evaluate, predict
from .multiclass import LAMBDA_MODES, STRATEGIES, train_multiclass
from .persistence import load_model, save_model
from .svm import Kernel
from .texture import FeatureVector, read_pgm, tile_and_extract

log = logging.getLogger("evsvm")

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_train(args) -> int:
    ds = load_dataset(args.data, args.frame)
    try:
        kernel = Kernel.parse(args.kernel, ds.dim)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    model = train_multiclass(ds.features, ds.labels, args.strategy, kernel, args.C,
                             frame=ds.frame, tol=args.tol, lambda_mode=args.lambda_mode)
    save_model(model, args.out)
    for m in model.members:
        cal = m.calibration
        log.info("classifier %s: %d support vectors, lambda_p=%.4g lambda_n=%.4g alpha=%.4f",
                 m.scope, len(m.model.dual_coefs), cal.lambda_p, cal.lambda_n, cal.alpha)
    return 0


def _load_eval_inputs(args):
    model = load_model(args.model)
    ds = load_dataset(args.data)
    if ds.dim != model.dim:
        raise DataError(f"{args.data}: dimension {ds.dim} does not match model dimension {model.dim}")
    return model, ds


def cmd_predict(args) -> int:
    model, ds = _load_eval_inputs(args)
    decisions, conflicts = predict(model, ds.features, RunConfig(args.rule, args.r))
    rows = [["index", "true", "decision", "conflict"]]
    for k, (lab, d, c) in enumerate(zip(ds.labels, decisions, conflicts)):
        rows.append([k, lab, d.label(model.frame), "" if np.isnan(c) else repr(float(c))])
    _write(_csv_text(rows), args.out)
    return 0


def _csv_text(rows) -> str:
    out = io.StringIO()
    csv.writer(out, lineterminator="\n").writerows(rows)
    return out.getvalue()


def cmd_eval(args) -> int:
    model, ds = _load_eval_inputs(args)
    report = evaluate(model, ds.features, ds.labels, RunConfig(args.rule, args.r))
    _write(report.to_csv() if args.report == "csv" else report.to_text(), args.out)
    return 0


def cmd_features(args) -> int:
    image = read_pgm(args.image)
    try:
        tiles = tile_and_extract(image, args.tile, args.levels)
    except ValueError as exc:
        raise DataError(f"{args.image}: {exc}") from None
    feats = np.array([fv.as_array() for _, fv in tiles])
    ds = Dataset(feats, np.array([args.label] * len(tiles)), Frame([args.label]))
    _write(dataset_to_csv(ds), args.out)
    log.info("%d tiles (%s)", len(tiles), ", ".join(FeatureVector.names()))
    return 0


def cmd_synth(args) -> int:
    spec = load_synth_spec(args.spec) if args.spec else benchmark_spec()
    ds = generate_synthetic(spec, args.seed)
    _write(dataset_to_csv(ds), args.out)
    if args.frame_out:
        Path(args.frame_out).write_text("\n".join(ds.frame.labels) + "\n", encoding="utf-8")
    return 0


def cmd_split(args) -> int:
    ds = load_dataset(args.data, args.frame)
    train, test = train_test_split(ds, args.ratio, args.seed)
    base = Path(args.data)
    save_dataset(train, args.train_out or base.with_name(base.stem + ".train.csv"))
    save_dataset(test, args.test_out or base.with_name(base.stem + ".test.csv"))
    return 0


def _unit_interval(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return v


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="evsvm", description="Evidential combination of binary SVMs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="train an evidential multiclass model")
    t.add_argument("--data", required=True)
    t.add_argument("--frame", help="file listing the learned classes, one per line")
    t.add_argument("--strategy", choices=STRATEGIES, default="ovo")
    t.add_argument("--kernel", default="rbf", help="linear | poly:DEGREE | rbf[:GAMMA] (default gamma 1/d)")
    t.add_argument("--C", type=_positive, default=1.0)
    t.add_argument("--tol", type=_positive, default=1e-3)
    t.add_argument("--lambda-mode", choices=LAMBDA_MODES, default="total")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    for name, func, help_ in (("predict", cmd_predict, "decide every sample"),
                              ("eval", cmd_eval, "confusion matrix with union and reject columns")):
        e = sub.add_parser(name, help=help_)
        e.add_argument("--model", required=True)
        e.add_argument("--data", required=True)
        e.add_argument("--rule", choices=RULES, default="process-12")
        e.add_argument("--r", type=_unit_interval, default=DEFAULT_R)
        e.add_argument("--out")
        if name == "eval":
            e.add_argument("--report", choices=("csv", "text"), default="text")
        e.set_defaults(func=func)

    f = sub.add_parser("features", help="co-occurrence features of PGM image tiles")
    f.add_argument("--image", required=True)
    f.add_argument("--tile", type=int, default=32)
    f.add_argument("--levels", type=int, default=16)
    f.add_argument("--label", default="unknown")
    f.add_argument("--out")
    f.set_defaults(func=cmd_features)

    s = sub.add_parser("synth", help="seeded Gaussian dataset (bundled benchmark by default)")
    s.add_argument("--spec", help="TOML spec; omit for the bundled benchmark")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--frame-out", help="also write the learned classes here")
    s.set_defaults(func=cmd_synth)

    sp = sub.add_parser("split", help="seeded per-class train/test split")
    sp.add_argument("--data", required=True)
    sp.add_argument("--frame")
    sp.add_argument("--ratio", type=float, default=2 / 3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--train-out")
    sp.add_argument("--test-out")
    sp.set_defaults(func=cmd_split)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"evsvm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, TotalConflictError, DegenerateMassError) as exc:
        print(f"evsvm: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError, ValueError) as exc:
        print(f"evsvm: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
