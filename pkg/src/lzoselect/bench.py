"""Repeated-split benchmark of the selectors and bound diagnostics."""

from __future__ import annotations

import configparser
import csv
import json
import logging
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import jsonschema
import numpy as np

from . import models
from .augment import AugmentedSet, MixupConfig
from .core import Dataset, load_csv, load_libsvm, minmax_scale, split_holdout
from .divergence import BoundInputs, histogram_js_estimate, linear_vc_dimension, theorem1_bound
from .models import LearnerSpec
from .selection import (ConfigGrid, derive_seed, holdout_select, kfold_cv_select,
                        leave_p_out_select, lzo_select, monte_carlo_cv_select)

log = logging.getLogger(__name__)

METHOD_KINDS = ("lzo", "kfold", "holdout", "mccv", "lpo")
DEFAULT_GRID = "svm:C=2^-5..2^5"

_NUM = r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"
_POW = re.compile(r"2\^([-+]?\d+)")


class GridSyntaxError(ValueError):
    pass


def _parse_value(text: str, pos: int) -> float:
    m = _POW.fullmatch(text)
    if m:
        return 2.0 ** int(m.group(1))
    if re.fullmatch(_NUM, text):
        return float(text)
    raise GridSyntaxError(f"bad value {text!r} at position {pos}")


def expand_grid(expr: str, epochs: int = models.DEFAULT_EPOCHS,
                average: bool = models.DEFAULT_AVERAGE) -> ConfigGrid:
    """Expand a grid expression into an ordered :class:`ConfigGrid`.

    Accepted forms::

        svm:C=2^-5..2^5      powers of two, ascending exponent
        svm:C=0.5,1,2^3      explicit list, in the given order
        majority | nn        the baseline learners

    Several terms can be joined with ``;``.
    """
    specs = []
    offset = 0
    for term in expr.split(";"):
        stripped = term.strip()
        pos = offset + term.index(stripped) if stripped else offset
        offset += len(term) + 1
        if stripped in ("majority", "nn", "nearest_neighbor"):
            specs.append(LearnerSpec("majority" if stripped == "majority" else "nearest_neighbor"))
            continue
        if not stripped.startswith("svm:C="):
            raise GridSyntaxError(f"expected 'svm:C=...' at position {pos}: {stripped!r}")
        body = stripped[len("svm:C="):]
        pos += len("svm:C=")
        if ".." in body:
            lo_text, hi_text = body.split("..", 1)
            lo, hi = _POW.fullmatch(lo_text.strip()), _POW.fullmatch(hi_text.strip())
            if not lo:
                raise GridSyntaxError(f"expected 2^<int> at position {pos}: {lo_text!r}")
            if not hi:
                raise GridSyntaxError(f"expected 2^<int> at position {pos + len(lo_text) + 2}: {hi_text!r}")
            a, b = int(lo.group(1)), int(hi.group(1))
            if a > b:
                raise GridSyntaxError(f"empty range: exponent {a} > {b}")
            specs.extend(LearnerSpec.svm(2.0 ** e, epochs, average) for e in range(a, b + 1))
        else:
            for item in body.split(","):
                if not item.strip():
                    raise GridSyntaxError(f"empty value at position {pos}")
                value = _parse_value(item.strip(), pos)
                if not value > 0:
                    raise GridSyntaxError(f"C must be > 0 at position {pos}")
                specs.append(LearnerSpec.svm(value, epochs, average))
                pos += len(item) + 1
    return ConfigGrid(tuple(specs))


@dataclass(frozen=True)
class MethodSpec:
    kind: str
    K: int = 10
    m_ratio: float = 10.0
    alpha: float = 1.0
    repeats: int = 10
    val_fraction: float = 0.3
    p: int = 1
    refit: bool = True

    def __post_init__(self):
        if self.kind not in METHOD_KINDS:
            raise ValueError(f"unknown method {self.kind!r}; choose from {METHOD_KINDS}")

    @property
    def label(self) -> str:
        if self.kind == "lzo":
            return f"lzo(m={self.m_ratio:g}n)"
        if self.kind == "kfold":
            return f"kfold(K={self.K})"
        if self.kind == "mccv":
            return f"mccv(R={self.repeats})"
        if self.kind == "lpo":
            return f"lpo(p={self.p})"
        return "holdout"

    def run(self, data: Dataset, grid: ConfigGrid, seed: int):
        if self.kind == "lzo":
            m = max(1, int(round(self.m_ratio * data.n)))
            return lzo_select(data, grid, MixupConfig(m, self.alpha, seed))
        if self.kind == "kfold":
            return kfold_cv_select(data, grid, self.K, seed, refit=self.refit)
        if self.kind == "holdout":
            return holdout_select(data, grid, self.val_fraction, seed, refit=self.refit)
        if self.kind == "mccv":
            return monte_carlo_cv_select(data, grid, self.repeats, self.val_fraction, seed,
                                         refit=self.refit)
        return leave_p_out_select(data, grid, self.p, seed, refit=self.refit)


@dataclass
class ExperimentConfig:
    data: str
    methods: list[MethodSpec]
    format: str = "csv"
    label_column: int = -1
    header: bool = True
    grid: str = DEFAULT_GRID
    epochs: int = models.DEFAULT_EPOCHS
    average: bool = models.DEFAULT_AVERAGE
    trials: int = 20
    test_fraction: float = 0.3
    seed: int = 42
    jobs: int = 1
    out: str | None = None
    name: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        if self.format not in ("csv", "libsvm"):
            raise ValueError(f"unknown format {self.format!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be >= 1")
        expand_grid(self.grid, self.epochs, self.average)

    def load(self) -> Dataset:
        return load_dataset(self.data, self.format, self.label_column, self.header, self.name)


def load_dataset(path, fmt: str = "csv", label_column: int = -1, header: bool = True,
                 name: str | None = None) -> Dataset:
    if fmt == "libsvm":
        return load_libsvm(path, name)
    return load_csv(path, label_column, header, name)


def _as_bool(text: str) -> bool:
    return configparser.ConfigParser.BOOLEAN_STATES[text.strip().lower()]


_EXPERIMENT_KEYS = {"data": str, "format": str, "label_column": int, "header": _as_bool,
                    "grid": str, "epochs": int, "average": _as_bool, "trials": int, "test_fraction": float,
                    "seed": int, "jobs": int, "out": str, "name": str}
_METHOD_KEYS = {"k": int, "m_ratio": float, "alpha": float, "repeats": int,
                "val_fraction": float, "p": int, "refit": _as_bool}


def read_config(path) -> ExperimentConfig:
    """Parse an INI-style experiment file.

    ``[experiment]`` holds the global keys; every other section is a method
    whose kind is the section name up to an optional ``:`` suffix, e.g.
    ``[lzo:m10]`` with ``m_ratio = 10``. Relative data/out paths resolve
    against the config file's directory.
    """
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";",))
    with open(path) as fh:
        parser.read_file(fh)
    if "experiment" not in parser:
        raise ValueError(f"{path}: missing [experiment] section")
    values = {}
    for key, raw in parser["experiment"].items():
        if key not in _EXPERIMENT_KEYS:
            raise ValueError(f"{path}: unknown key {key!r} in [experiment]")
        values[key] = _EXPERIMENT_KEYS[key](raw)
    for key in ("data", "out"):
        if key in values and not Path(values[key]).is_absolute():
            values[key] = str(path.parent / values[key])
    methods = []
    for section in parser.sections():
        if section == "experiment":
            continue
        kind = section.split(":", 1)[0].strip()
        opts = {}
        for key, raw in parser[section].items():
            if key not in _METHOD_KEYS:
                raise ValueError(f"{path}: unknown key {key!r} in [{section}]")
            opts["K" if key == "k" else key] = _METHOD_KEYS[key](raw)
        methods.append(MethodSpec(kind, **opts))
    if "data" not in values:
        raise ValueError(f"{path}: [experiment] needs a data path")
    return ExperimentConfig(methods=methods, **values)


@dataclass
class ResultRow:
    dataset: str
    method: str
    mean_test_accuracy: float
    std_test_accuracy: float
    mean_wall_time: float
    std_wall_time: float
    mean_models_trained: float
    trials: int
    skipped: int = 0


# wall times change run to run; they stay out of the table file
CSV_FIELDS = ("dataset", "method", "mean_test_accuracy", "std_test_accuracy",
              "mean_models_trained", "trials", "skipped")


def _warm_up():
    # compile the SGD kernel outside any timed region
    toy = Dataset(np.array([[0.0], [1.0]]), np.array([0, 1]), 2)
    models.train(LearnerSpec.svm(1.0, 1), toy, 0)


def run_trial(cfg: ExperimentConfig, data: Dataset, t: int) -> list[dict]:
    """One random split: select with every method on train, score on test."""
    seed_t = derive_seed(cfg.seed, t)
    grid = expand_grid(cfg.grid, cfg.epochs, cfg.average)
    try:
        train, test = split_holdout(data, cfg.test_fraction, derive_seed(seed_t, 0))
        train, (test,), _ = minmax_scale(train, [test])
    except ValueError as exc:
        log.warning("trial %d skipped: %s", t, exc)
        return [{"trial": t, "method": m.label, "skipped": True, "error": str(exc)}
                for m in cfg.methods]
    records = []
    for method in cfg.methods:
        try:
            model, report = method.run(train, grid, derive_seed(seed_t, 1))
        except ValueError as exc:
            log.warning("trial %d, %s skipped: %s", t, method.label, exc)
            records.append({"trial": t, "method": method.label, "skipped": True, "error": str(exc)})
            continue
        if set(np.intersect1d(train.ids, test.ids).tolist()):
            raise RuntimeError("train and test splits overlap")
        records.append({
            "trial": t, "method": method.label, "skipped": False, "seed": seed_t,
            "test_accuracy": models.accuracy(model, test),
            "wall_time_seconds": round(report.wall_time_seconds, 3),
            "refit_seconds": round(report.refit_seconds, 3),
            "models_trained": report.models_trained,
            "chosen_index": report.chosen_index,
            "chosen_spec": report.chosen_spec,
            "per_config_risk": report.per_config_risk,
            "model_fingerprint": model.fingerprint,
            "train_fingerprint": train.fingerprint(),
            "test_fingerprint": test.fingerprint(),
        })
    return records


def _run_trial_star(args):
    return run_trial(*args)


def aggregate(dataset: str, cfg: ExperimentConfig, records: list[dict]) -> list[ResultRow]:
    """Mean and population std per method."""
    rows = []
    for method in cfg.methods:
        mine = [r for r in records if r["method"] == method.label]
        done = [r for r in mine if not r["skipped"]]
        acc = np.array([r["test_accuracy"] for r in done])
        wall = np.array([r["wall_time_seconds"] for r in done])
        count = np.array([r["models_trained"] for r in done], dtype=np.float64)
        nan = math.nan
        rows.append(ResultRow(
            dataset, method.label,
            float(acc.mean()) if done else nan, float(acc.std()) if done else nan,
            float(wall.mean()) if done else nan, float(wall.std()) if done else nan,
            float(count.mean()) if done else nan, len(done), len(mine) - len(done)))
    return rows


def run_experiment(cfg: ExperimentConfig, data: Dataset | None = None) -> list[ResultRow]:
    """Run ``cfg.trials`` seeded splits and write results when ``cfg.out`` is set.

    Writes ``results.csv`` (no timing columns, byte-stable for a fixed
    config), ``results.json`` (all columns plus the config) and
    ``trials.jsonl`` (one record per trial and method).
    """
    data = cfg.load() if data is None else data
    labels = [m.label for m in cfg.methods]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate methods: {labels}")
    _warm_up()
    jobs = [(cfg, data, t) for t in range(cfg.trials)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(cfg.jobs, initializer=_warm_up) as pool:
            per_trial = list(pool.map(_run_trial_star, jobs))
    else:
        per_trial = [run_trial(*job) for job in jobs]
    records = [r for trial in per_trial for r in trial]
    rows = aggregate(data.name, cfg, records)
    if cfg.out:
        write_results(Path(cfg.out), cfg, rows, records)
    return rows


def _config_dict(cfg: ExperimentConfig) -> dict:
    doc = asdict(cfg)
    doc["methods"] = [dict(asdict(m), label=m.label) for m in cfg.methods]
    return doc


def write_results(out: Path, cfg: ExperimentConfig, rows: list[ResultRow],
                  records: list[dict]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "results.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for row in rows:
            d = asdict(row)
            writer.writerow([repr(d[f]) if isinstance(d[f], float) else d[f] for f in CSV_FIELDS])
    with open(out / "results.json", "w") as fh:
        json.dump({"config": _config_dict(cfg), "rows": [asdict(r) for r in rows],
                   "created": time.strftime("%Y-%m-%dT%H:%M:%S")}, fh, indent=2)
        fh.write("\n")
    with open(out / "trials.jsonl", "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def format_table(rows: list[ResultRow]) -> str:
    head = f"{'dataset':<12} {'method':<14} {'accuracy':>16} {'time(s)':>16} {'models':>8} {'trials':>6}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r.dataset:<12} {r.method:<14} "
                     f"{100 * r.mean_test_accuracy:>8.2f} ± {100 * r.std_test_accuracy:<5.2f} "
                     f"{r.mean_wall_time:>8.3f} ± {r.std_wall_time:<5.3f} "
                     f"{r.mean_models_trained:>8.0f} {r.trials:>6}")
    return "\n".join(lines)


BOUND_REPORT_SCHEMA = {
    "type": "object",
    "required": ["kind", "B", "m", "v", "delta", "divergence_term", "bound",
                 "vc_term", "heuristic_divergence", "divergence_estimator", "bins", "n", "d"],
    "properties": {
        "kind": {"const": "theorem1"},
        "B": {"type": "number", "minimum": 0},
        "m": {"type": "integer", "minimum": 1},
        "v": {"type": "integer", "minimum": 1},
        "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "divergence_term": {"type": "number", "minimum": 0, "maximum": math.log(2)},
        "bound": {"type": "number", "minimum": 0},
        "vc_term": {"type": "number", "minimum": 0},
        "heuristic_divergence": {"const": True},
        "divergence_estimator": {"type": "string"},
        "bins": {"type": "integer", "minimum": 2},
        "n": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 1},
    },
    "additionalProperties": False,
}


def validate_bound_report(doc: dict) -> dict:
    jsonschema.validate(doc, BOUND_REPORT_SCHEMA)
    return doc


def emit_bound_report(data: Dataset, V: AugmentedSet, d: int, m: int | None = None,
                      delta: float = 0.05, bins: int = 8) -> dict:
    """Evaluate the JS-plus-VC bias bound for a linear model on ``V``.

    The divergence is the per-feature histogram heuristic, not an exact JS,
    and the document says so.
    """
    m = V.data.n if m is None else m
    div = histogram_js_estimate(data, V.data, bins)
    inputs = BoundInputs(B=models.ZERO_ONE.B, m=m, v=linear_vc_dimension(d), delta=delta,
                         divergence_term=div)
    doc = {"kind": "theorem1", **asdict(inputs), "bound": theorem1_bound(inputs),
           "vc_term": theorem1_bound(BoundInputs(inputs.B, m, inputs.v, delta, 0.0)),
           "heuristic_divergence": True,
           "divergence_estimator": "product-marginal histogram heuristic",
           "bins": bins, "n": data.n, "d": d}
    return validate_bound_report(doc)
