"""Command line entry point: ``lzoselect run | bound | augment``."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .augment import MixupConfig, label_invariant_mixup
from .bench import (DEFAULT_GRID, ExperimentConfig, MethodSpec, emit_bound_report, format_table,
                    load_dataset, read_config, run_experiment)
from .core import minmax_scale, save_csv, save_libsvm


def _add_data_args(p, required=True):
    p.add_argument("--data", required=required, help="dataset path")
    p.add_argument("--format", choices=("csv", "libsvm"), help="input format (default csv)")
    p.add_argument("--label-column", type=int, help="CSV label column (default -1, the last)")
    p.add_argument("--no-header", action="store_true", help="CSV has no header row")


def _load(args):
    fmt = args.format or ("libsvm" if not str(args.data).endswith(".csv") else "csv")
    label_column = -1 if args.label_column is None else args.label_column
    return load_dataset(args.data, fmt, label_column, not args.no_header)


def _float_list(text):
    return [float(v) for v in text.split(",")]


def _methods_from_flags(args) -> list[MethodSpec]:
    methods = []
    for kind in args.methods.split(","):
        kind = kind.strip()
        common = dict(K=args.k, alpha=args.alpha, repeats=args.repeats, p=args.p,
                      val_fraction=args.val_fraction, refit=not args.no_refit)
        if kind == "lzo":
            methods.extend(MethodSpec("lzo", m_ratio=r, **common) for r in args.m_ratio)
        else:
            methods.append(MethodSpec(kind, **common))
    return methods


def cmd_run(args) -> int:
    overrides = {}
    if args.config:
        cfg = read_config(args.config)
    else:
        if not args.data:
            raise SystemExit("run: need --config or --data")
        cfg = ExperimentConfig(data=args.data, methods=_methods_from_flags(args))
    if args.data:
        overrides["data"] = args.data
    if args.format:
        overrides["format"] = args.format
    elif args.data:
        overrides["format"] = "csv" if args.data.endswith(".csv") else "libsvm"
    if args.label_column is not None:
        overrides["label_column"] = args.label_column
    if args.no_header:
        overrides["header"] = False
    if args.final_iterate:
        overrides["average"] = False
    if args.config and args.methods_given:
        overrides["methods"] = _methods_from_flags(args)
    for key in ("grid", "trials", "test_fraction", "seed", "jobs", "out", "epochs"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    cfg = dataclasses.replace(cfg, **overrides)
    rows = run_experiment(cfg)
    print(format_table(rows))
    if cfg.out:
        print(f"\nwrote {Path(cfg.out) / 'results.csv'}")
    return 0


def cmd_bound(args) -> int:
    data = _load(args)
    data, _, _ = minmax_scale(data)
    m = max(1, round(args.m_ratio * data.n))
    V = label_invariant_mixup(data, MixupConfig(m, args.alpha, args.seed))
    doc = emit_bound_report(data, V, data.d, m, args.delta, args.bins)
    text = json.dumps(doc, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_augment(args) -> int:
    data = _load(args)
    m = max(1, round(args.m_ratio * data.labeled().n))
    V = label_invariant_mixup(data, MixupConfig(m, args.alpha, args.seed))
    out = Path(args.out)
    if out.suffix == ".csv":
        save_csv(V.data, out)
    else:
        save_libsvm(V.data, out)
    sidecar = out.with_name(out.name + ".provenance.jsonl")
    V.write_provenance(sidecar)
    print(f"wrote {V.data.n} samples to {out} and provenance to {sidecar}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lzoselect", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="benchmark selectors over repeated random splits")
    run.add_argument("--config", help="INI experiment file; flags override it")
    _add_data_args(run, required=False)
    run.add_argument("--methods", default="lzo,kfold",
                     help="comma list of lzo,kfold,holdout,mccv,lpo")
    run.add_argument("--k", type=int, default=10, help="folds for kfold")
    run.add_argument("--m-ratio", type=_float_list, default=[1.0, 10.0],
                     help="validation size as multiples of n; a comma list adds one lzo row each")
    run.add_argument("--alpha", type=float, default=1.0, help="Beta(alpha, alpha) mixing")
    run.add_argument("--repeats", type=int, default=10, help="splits for mccv")
    run.add_argument("--val-fraction", type=float, default=0.3, help="holdout/mccv fraction")
    run.add_argument("--p", type=int, default=1, help="p for leave-p-out")
    run.add_argument("--no-refit", action="store_true", help="skip the CV refit")
    run.add_argument("--grid", help=f"candidate grid (default {DEFAULT_GRID!r})")
    run.add_argument("--epochs", type=int, help="SGD epochs per model")
    run.add_argument("--final-iterate", action="store_true",
                     help="return the last SGD iterate instead of the suffix average")
    run.add_argument("--trials", type=int)
    run.add_argument("--test-fraction", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--jobs", type=int)
    run.add_argument("--out", help="output directory")
    run.set_defaults(func=cmd_run)

    bound = sub.add_parser("bound", help="evaluate the bias bound on a mix-up set")
    _add_data_args(bound)
    bound.add_argument("--m-ratio", type=float, default=10.0)
    bound.add_argument("--alpha", type=float, default=1.0)
    bound.add_argument("--delta", type=float, default=0.05)
    bound.add_argument("--bins", type=int, default=8)
    bound.add_argument("--seed", type=int, default=0)
    bound.add_argument("--out", default="bound.json")
    bound.set_defaults(func=cmd_bound)

    aug = sub.add_parser("augment", help="write a mix-up validation set")
    _add_data_args(aug)
    aug.add_argument("--m-ratio", type=float, default=1.0)
    aug.add_argument("--alpha", type=float, default=1.0)
    aug.add_argument("--seed", type=int, default=0)
    aug.add_argument("--out", required=True, help="output file (.csv or LIBSVM otherwise)")
    aug.set_defaults(func=cmd_augment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    args = parser.parse_args(argv)
    args.methods_given = "--methods" in argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
