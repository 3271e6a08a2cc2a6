"""Model selection: leave-zero-out against the cross-validation family.

Every selector returns ``(model, report)``. ``report.models_trained`` counts
calls to :func:`lzoselect.models.train` made by the selector:

=============  ==========================
lzo            C
kfold          K*C (+1 with refit)
holdout        C (+1 with refit)
mccv           R*C (+1 with refit)
lpo            binom(n, p)*C (+1 with refit)
=============  ==========================
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import models
from .augment import MixupConfig, label_invariant_mixup, pseudo_label
from .core import Dataset, holdout_indices, kfold_indices
from .models import ZERO_ONE, LearnerSpec, LossSpec, TrainedModel

LPO_MAX_SPLITS = 100_000


def derive_seed(*parts) -> int:
    """Stable 32-bit seed for a work unit identified by integer ``parts``."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


# stream tags keep the derived seeds of different unit kinds apart
_MIX, _SPLIT, _FIT, _REFIT = 1, 2, 3, 4


@dataclass(frozen=True)
class ConfigGrid:
    specs: tuple[LearnerSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise ValueError("grid is empty")

    def __len__(self):
        return len(self.specs)

    def __iter__(self):
        return iter(self.specs)

    def __getitem__(self, i):
        return self.specs[i]


@dataclass
class SelectionReport:
    method: str
    per_config_risk: list[float]
    chosen_index: int
    models_trained: int
    wall_time_seconds: float
    seed: int
    dataset: str = ""
    chosen_spec: dict = field(default_factory=dict)
    refit_seconds: float = 0.0
    # per split/fold risks, rows = splits, columns = configs
    split_risks: list[list[float]] = field(default_factory=list, repr=False)

    @property
    def per_config_accuracy(self) -> list[float]:
        return [1.0 - r for r in self.per_config_risk]

    def to_dict(self) -> dict:
        return {"method": self.method, "dataset": self.dataset, "seed": self.seed,
                "per_config_risk": list(self.per_config_risk),
                "chosen_index": self.chosen_index, "chosen_spec": self.chosen_spec,
                "models_trained": self.models_trained,
                "wall_time_seconds": self.wall_time_seconds,
                "refit_seconds": self.refit_seconds}


def argmin_first(values: Sequence[float]) -> int:
    values = list(values)
    return values.index(min(values))


def _as_grid(grid) -> ConfigGrid:
    return grid if isinstance(grid, ConfigGrid) else ConfigGrid(tuple(grid))


class _Counter:
    def __init__(self):
        self.calls = 0

    def fit(self, spec, data, seed) -> TrainedModel:
        self.calls += 1
        return models.train(spec, data, seed)


def lzo_select(data: Dataset, grid, mixup: MixupConfig, loss: LossSpec = ZERO_ONE,
               seed: int | None = None) -> tuple[TrainedModel, SelectionReport]:
    """Leave-zero-out selection.

    Every candidate is trained once on all of ``data`` and scored on one
    mix-up validation set; the best model is returned as is, without any
    refit. If ``data`` has unlabeled rows each candidate is trained on the
    labeled rows, pseudo-labels the rest, and is scored on a mix-up set drawn
    from its own pseudo-labeled pool (same mix-up seed for every candidate).
    Training streams derive from ``seed``, which defaults to ``mixup.seed``.
    """
    grid = _as_grid(grid)
    seed = mixup.seed if seed is None else seed
    counter = _Counter()
    start = time.perf_counter()
    semi = not data.fully_labeled
    train_data = data.labeled() if semi else data
    val = None if semi else label_invariant_mixup(data, mixup).data

    fitted, risks = [], []
    for i, spec in enumerate(grid):
        model = counter.fit(spec, train_data, derive_seed(seed, _FIT, i))
        v = label_invariant_mixup(pseudo_label(model, data), mixup).data if semi else val
        risks.append(models.empirical_risk(model, v, loss))
        fitted.append(model)
    best = argmin_first(risks)
    elapsed = time.perf_counter() - start
    report = SelectionReport("lzo", risks, best, counter.calls, elapsed, seed,
                             data.name, grid[best].to_dict())
    return fitted[best], report


def _cv(method: str, data: Dataset, grid: ConfigGrid, splits, seed: int, loss: LossSpec,
        refit: bool, start: float) -> tuple[TrainedModel, SelectionReport]:
    """Shared loop: ``splits`` yields (train_index, val_index) pairs on ``data``."""
    counter = _Counter()
    split_risks = []
    first_models = None
    for s, (tr, va) in enumerate(splits):
        train_part, val_part = data.subset(tr), data.subset(va)
        row, fitted = [], []
        for i, spec in enumerate(grid):
            model = counter.fit(spec, train_part, derive_seed(seed, _FIT, s, i))
            row.append(models.empirical_risk(model, val_part, loss))
            fitted.append(model)
        if first_models is None:
            first_models = fitted
        split_risks.append(row)
    risks = np.mean(np.asarray(split_risks), axis=0).tolist()
    best = argmin_first(risks)
    refit_seconds = 0.0
    if refit:
        t0 = time.perf_counter()
        model = counter.fit(grid[best], data, derive_seed(seed, _REFIT))
        refit_seconds = time.perf_counter() - t0
    else:
        model = first_models[best]
    elapsed = time.perf_counter() - start
    report = SelectionReport(method, risks, best, counter.calls, elapsed, seed, data.name,
                             grid[best].to_dict(), refit_seconds, split_risks)
    return model, report


def kfold_cv_select(data: Dataset, grid, K: int = 10, seed: int = 0,
                    loss: LossSpec = ZERO_ONE, refit: bool = True):
    """Stratified K-fold CV; risk of a config is the mean held-out fold risk.

    Only labeled rows are folded. Without ``refit`` the chosen config's
    model from the first fold is returned and no extra model is trained.
    """
    grid = _as_grid(grid)
    start = time.perf_counter()
    data = data.labeled()
    folds = kfold_indices(data.n, K, derive_seed(seed, _SPLIT), labels=data.y)
    everything = np.arange(data.n)
    splits = [(np.setdiff1d(everything, f), f) for f in folds]
    return _cv("kfold", data, grid, splits, seed, loss, refit, start)


def monte_carlo_cv_select(data: Dataset, grid, repeats: int = 10, val_fraction: float = 0.3,
                          seed: int = 0, loss: LossSpec = ZERO_ONE, refit: bool = True,
                          method: str = "mccv"):
    """Mean held-out risk over ``repeats`` independent stratified splits."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    if not 0.0 < val_fraction < 1.0:
        raise ValueError(f"val_fraction must lie in (0, 1), got {val_fraction}")
    grid = _as_grid(grid)
    start = time.perf_counter()
    data = data.labeled()
    splits = (holdout_indices(data, val_fraction, derive_seed(seed, _SPLIT, r))
              for r in range(repeats))
    return _cv(method, data, grid, splits, seed, loss, refit, start)


def holdout_select(data: Dataset, grid, val_fraction: float = 0.3, seed: int = 0,
                   loss: LossSpec = ZERO_ONE, refit: bool = True):
    """A single stratified split; the one-repeat case of Monte-Carlo CV."""
    return monte_carlo_cv_select(data, grid, 1, val_fraction, seed, loss, refit,
                                 method="holdout")


def leave_p_out_select(data: Dataset, grid, p: int = 1, seed: int = 0,
                       loss: LossSpec = ZERO_ONE, refit: bool = True):
    """Exhaustive leave-p-out over every size-``p`` subset of the labeled rows."""
    if not 1 <= p <= 3:
        raise ValueError(f"p must lie in 1..3, got {p}")
    grid = _as_grid(grid)
    start = time.perf_counter()
    data = data.labeled()
    if p >= data.n:
        raise ValueError(f"p={p} leaves no training data for n={data.n}")
    count = math.comb(data.n, p)
    if count > LPO_MAX_SPLITS:
        raise ValueError(f"leave-{p}-out needs {count} splits for n={data.n}, "
                         f"more than the limit of {LPO_MAX_SPLITS}")
    everything = np.arange(data.n)

    def splits():
        for held in itertools.combinations(range(data.n), p):
            held = np.asarray(held)
            yield np.setdiff1d(everything, held), held

    return _cv("lpo", data, grid, splits(), seed, loss, refit, start)
