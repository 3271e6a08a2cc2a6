"""Dataset container, loaders, scaling and seeded splitters."""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

UNLABELED = -1


class Sample(NamedTuple):
    features: np.ndarray
    label: int | None


@dataclass(frozen=True, eq=False)
class Dataset:
    """Dense labeled (or partially labeled) dataset.

    ``y`` holds class ids in ``0..k-1`` and ``UNLABELED`` (-1) for samples
    without a label. ``ids`` are stable row identifiers that survive
    subsetting, so a model or augmented set can be traced back to the rows
    it was built from. ``classes`` maps class id to the original label text.
    """

    X: np.ndarray
    y: np.ndarray
    k: int
    name: str = "data"
    ids: np.ndarray | None = None
    classes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2:
            raise ValueError("X must be 2-dimensional")
        if X.shape[0] < 1:
            raise ValueError("empty dataset")
        if X.shape[1] < 1:
            raise ValueError("dataset needs at least one feature")
        if y.shape != (X.shape[0],):
            raise ValueError(f"y has shape {y.shape}, expected ({X.shape[0]},)")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if np.any((y < UNLABELED) | (y >= self.k)):
            raise ValueError(f"labels must lie in 0..{self.k - 1} (or -1 for unlabeled)")
        ids = np.arange(X.shape[0]) if self.ids is None else np.asarray(self.ids, dtype=np.int64)
        if ids.shape != y.shape:
            raise ValueError("ids must have one entry per sample")
        classes = tuple(self.classes) or tuple(str(c) for c in range(self.k))
        if len(classes) != self.k:
            raise ValueError("classes must name every class id")
        X.setflags(write=False)
        y.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "classes", classes)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def labeled_mask(self) -> np.ndarray:
        return self.y != UNLABELED

    @property
    def n_labeled(self) -> int:
        return int(np.count_nonzero(self.labeled_mask))

    @property
    def fully_labeled(self) -> bool:
        return self.n_labeled == self.n

    def __len__(self):
        return self.n

    def __getitem__(self, i: int) -> Sample:
        label = int(self.y[i])
        return Sample(self.X[i], None if label == UNLABELED else label)

    @property
    def samples(self) -> list[Sample]:
        return [self[i] for i in range(self.n)]

    def subset(self, index, name: str | None = None) -> "Dataset":
        index = np.asarray(index, dtype=np.int64)
        return Dataset(self.X[index], self.y[index], self.k, name or self.name,
                       self.ids[index], self.classes)

    def labeled(self) -> "Dataset":
        return self.subset(np.flatnonzero(self.labeled_mask))

    def with_labels(self, y) -> "Dataset":
        return Dataset(self.X, y, self.k, self.name, self.ids, self.classes)

    def with_features(self, X) -> "Dataset":
        return Dataset(X, self.y, self.k, self.name, self.ids, self.classes)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y[self.labeled_mask], minlength=self.k)

    def fingerprint(self) -> str:
        """Hash of the sorted row ids; identifies which rows a dataset holds."""
        return ids_fingerprint(self.ids)


def ids_fingerprint(ids) -> str:
    ids = np.sort(np.asarray(ids, dtype=np.int64))
    return hashlib.sha1(ids.tobytes()).hexdigest()


class _LabelEncoder:
    """First-appearance label remapping shared by the loaders."""

    def __init__(self):
        self.mapping: dict[str, int] = {}

    def __call__(self, token: str) -> int:
        if token not in self.mapping:
            self.mapping[token] = len(self.mapping)
        return self.mapping[token]

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(self.mapping)


def load_libsvm(path, name: str | None = None) -> Dataset:
    """Read a LIBSVM text file into a dense Dataset.

    Absent indices become 0.0 and ``d`` is the largest index seen. Label
    tokens are remapped to ``0..k-1`` in order of first appearance.
    """
    path = Path(path)
    encoder = _LabelEncoder()
    labels, rows = [], []
    d = 0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            row = {}
            last = 0
            for tok in tokens[1:]:
                idx_text, sep, val_text = tok.partition(":")
                try:
                    if not sep:
                        raise ValueError
                    idx = int(idx_text)
                    val = float(val_text)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: malformed feature {tok!r}") from None
                if idx < 1:
                    raise ValueError(f"{path}:{lineno}: feature index must be >= 1, got {idx}")
                if idx <= last:
                    raise ValueError(f"{path}:{lineno}: indices not ascending ({last} then {idx})")
                last = idx
                row[idx] = val
            labels.append(UNLABELED if tokens[0] == "?" else encoder(tokens[0]))
            rows.append(row)
            d = max(d, last)
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    if d == 0:
        raise ValueError(f"{path}: no features found")
    X = np.zeros((len(rows), d))
    for i, row in enumerate(rows):
        for idx, val in row.items():
            X[i, idx - 1] = val
    k = max(len(encoder.classes), 1)
    return Dataset(X, labels, k, name or path.stem, classes=encoder.classes or ("0",))


def save_libsvm(data: Dataset, path) -> None:
    """Write ``data`` in LIBSVM format using the original label text.

    Zero features are omitted except the last one, which is always written
    so the dimension survives a reload. Values use ``repr`` and round-trip
    exactly. Unlabeled samples are written with label ``?``.
    """
    last = data.d - 1
    with open(path, "w") as fh:
        for x, label in zip(data.X, data.y):
            head = "?" if label == UNLABELED else data.classes[label]
            feats = " ".join(f"{j + 1}:{float(v)!r}" for j, v in enumerate(x)
                             if v != 0.0 or j == last)
            fh.write(f"{head} {feats}".rstrip() + "\n")


def load_csv(path, label_column: int = -1, has_header: bool = False,
             name: str | None = None) -> Dataset:
    """Read a numeric CSV table with one label column.

    A label cell holding ``?`` marks the row as unlabeled. Negative
    ``label_column`` counts from the end, as in Python indexing.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    width = len(rows[0])
    if width < 2:
        raise ValueError(f"{path}: need a label column and at least one feature column")
    col = label_column + width if label_column < 0 else label_column
    if not 0 <= col < width:
        raise ValueError(f"{path}: label column {label_column} out of range for {width} columns")
    encoder = _LabelEncoder()
    X = np.empty((len(rows), width - 1))
    y = np.empty(len(rows), dtype=np.int64)
    offset = 2 if has_header else 1
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}:{i + offset}: ragged row ({len(row)} cells, expected {width})")
        cells = [c.strip() for c in row]
        label = cells.pop(col)
        y[i] = UNLABELED if label == "?" else encoder(label)
        try:
            X[i] = [float(c) for c in cells]
        except ValueError:
            raise ValueError(f"{path}:{i + offset}: non-numeric feature cell") from None
    k = max(len(encoder.classes), 1)
    classes = encoder.classes or ("0",)
    return Dataset(X, y, k, name or path.stem, classes=classes)


def save_csv(data: Dataset, path, header: bool = True) -> None:
    """Write features followed by a final ``label`` column."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow([f"x{j + 1}" for j in range(data.d)] + ["label"])
        for x, label in zip(data.X, data.y):
            tag = "?" if label == UNLABELED else data.classes[label]
            writer.writerow([repr(float(v)) for v in x] + [tag])


@dataclass(frozen=True)
class ScalingParams:
    low: np.ndarray
    span: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[-1] != self.low.shape[0]:
            raise ValueError(f"dimension mismatch: {X.shape[-1]} vs {self.low.shape[0]}")
        out = np.zeros_like(X)
        keep = self.span > 0
        out[..., keep] = (X[..., keep] - self.low[keep]) / self.span[keep]
        return out


def minmax_scale(train: Dataset, others: Sequence[Dataset] = ()):
    """Fit a per-feature [0, 1] map on ``train`` and apply it everywhere.

    Constant features map to 0.0. Values outside the training range are not
    clipped. Returns ``(train_scaled, others_scaled, params)``.
    """
    for other in others:
        if other.d != train.d:
            raise ValueError(f"dimension mismatch: train has d={train.d}, {other.name} has d={other.d}")
    low = train.X.min(axis=0)
    params = ScalingParams(low, train.X.max(axis=0) - low)
    scaled = [o.with_features(params.apply(o.X)) for o in others]
    return train.with_features(params.apply(train.X)), scaled, params


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def largest_remainder(quotas, total: int) -> np.ndarray:
    """Integer allocation of ``total`` proportional to ``quotas``.

    Floors every quota and hands the leftover units to the largest
    fractional parts, ties going to the lowest index.
    """
    quotas = np.asarray(quotas, dtype=np.float64)
    base = np.floor(quotas).astype(np.int64)
    left = total - int(base.sum())
    if left < 0 or left > len(quotas):
        raise ValueError("quotas do not sum to the requested total")
    if left:
        order = np.lexsort((np.arange(len(quotas)), -(quotas - base)))
        base[order[:left]] += 1
    return base


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def holdout_indices(data: Dataset, test_fraction: float, seed) -> tuple[np.ndarray, np.ndarray]:
    """Row positions ``(train, test)`` of a stratified split.

    Per-class test counts are the largest-remainder rounding of
    ``n_c * test_fraction`` with total ``round(n_labeled * test_fraction)``.
    Unlabeled samples, if any, stay on the training side.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    labeled = np.flatnonzero(data.labeled_mask)
    if len(labeled) < 2:
        raise ValueError("need at least 2 labeled samples to split")
    counts = data.class_counts()
    present = np.flatnonzero(counts)
    n_test = round_half_up(len(labeled) * test_fraction)
    per_class = np.zeros(data.k, dtype=np.int64)
    per_class[present] = largest_remainder(counts[present] * test_fraction, n_test)
    if np.any(per_class[present] >= counts[present]):
        bad = [data.classes[c] for c in present if per_class[c] >= counts[c]]
        raise ValueError(f"classes {bad} would have no training samples")
    rng = _rng(seed)
    test = []
    for c in present:
        members = np.flatnonzero(data.y == c)
        test.append(rng.permutation(members)[: per_class[c]])
    test = np.sort(np.concatenate(test))
    return np.setdiff1d(np.arange(data.n), test), test


def split_holdout(data: Dataset, test_fraction: float, seed) -> tuple[Dataset, Dataset]:
    train, test = holdout_indices(data, test_fraction, seed)
    return data.subset(train), data.subset(test)


def label_marginal(data: Dataset) -> np.ndarray:
    """Empirical class distribution over the labeled samples."""
    counts = data.class_counts()
    total = counts.sum()
    if total == 0:
        raise ValueError("no labeled samples")
    return counts / total


def kfold_indices(n: int, K: int, seed, labels=None) -> list[np.ndarray]:
    """Split ``range(n)`` into K disjoint folds with sizes differing by at most one.

    With ``labels`` the folds are stratified: samples are grouped by class,
    shuffled within class, and dealt round-robin across folds.
    """
    if not 2 <= K <= n:
        raise ValueError(f"need 2 <= K <= n, got K={K}, n={n}")
    rng = _rng(seed)
    if labels is None:
        order = rng.permutation(n)
    else:
        labels = np.asarray(labels)
        if labels.shape != (n,):
            raise ValueError("labels must have length n")
        order = np.concatenate([rng.permutation(np.flatnonzero(labels == c))
                                for c in np.unique(labels)])
    assignment = np.empty(n, dtype=np.int64)
    assignment[order] = np.arange(n) % K
    return [np.flatnonzero(assignment == f) for f in range(K)]
