"""Label-invariant mix-up for building an augmented validation set."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import UNLABELED, Dataset, largest_remainder

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MixupConfig:
    m: int
    alpha: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")


@dataclass(frozen=True, eq=False)
class AugmentedSet:
    """Augmented samples plus, per sample, the source positions and weight.

    ``pairs[i] = (j, k)`` index rows of the source dataset, so
    ``data.X[i] == lam[i] * src.X[j] + (1 - lam[i]) * src.X[k]``.
    """

    data: Dataset
    pairs: np.ndarray
    lam: np.ndarray

    def provenance(self):
        for (j, k), lam in zip(self.pairs, self.lam):
            yield {"j": int(j), "k": int(k), "lambda": float(lam)}

    def write_provenance(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self.provenance():
                fh.write(json.dumps(rec) + "\n")


def _log_gamma_ge1(alpha: float, rng: np.random.Generator, size: int) -> np.ndarray:
    # Marsaglia-Tsang squeeze/rejection; alpha >= 1
    d = alpha - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(size)
    todo = np.arange(size)
    while todo.size:
        x = rng.standard_normal(todo.size)
        v = (1.0 + c * x) ** 3
        u = rng.random(todo.size)
        ok = v > 0
        logv = np.log(np.where(ok, v, 1.0))
        accept = ok & ((u < 1.0 - 0.0331 * x ** 4) |
                       (np.log(u) < 0.5 * x * x + d * (1.0 - v + logv)))
        out[todo[accept]] = np.log(d) + logv[accept]
        todo = todo[~accept]
    return out


def log_gamma_sample(alpha: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Logarithms of ``size`` Gamma(alpha, 1) draws.

    Small shapes use the boost G(a) = G(a + 1) * U**(1/a), done in log space
    so that tiny alphas do not underflow to zero.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if alpha >= 1.0:
        return _log_gamma_ge1(alpha, rng, size)
    boosted = _log_gamma_ge1(alpha + 1.0, rng, size)
    return boosted + np.log(rng.random(size)) / alpha


def gamma_sample(alpha: float, rng: np.random.Generator, size: int | None = None):
    draws = np.exp(log_gamma_sample(alpha, rng, 1 if size is None else size))
    return float(draws[0]) if size is None else draws


def beta_sample(alpha: float, rng: np.random.Generator, size: int | None = None):
    """Symmetric Beta(alpha, alpha) draws as G1 / (G1 + G2)."""
    n = 1 if size is None else size
    g1 = log_gamma_sample(alpha, rng, n)
    g2 = log_gamma_sample(alpha, rng, n)
    lam = expit(g1 - g2)
    return float(lam[0]) if size is None else lam


def mixup_pair(x_j, x_k, lam: float) -> np.ndarray:
    x_j = np.asarray(x_j, dtype=np.float64)
    x_k = np.asarray(x_k, dtype=np.float64)
    if x_j.shape != x_k.shape:
        raise ValueError(f"dimension mismatch: {x_j.shape} vs {x_k.shape}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return lam * x_j + (1.0 - lam) * x_k


def allocate_class_counts(counts, m: int) -> np.ndarray:
    """Per-class sample counts for an augmented set of size ``m``.

    Proportional to ``counts`` with largest-remainder rounding, so the sum
    is exactly ``m`` and each entry is within one of its exact share.
    """
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("no labeled samples to allocate from")
    return largest_remainder(m * counts / total, m)


def label_invariant_mixup(data: Dataset, cfg: MixupConfig) -> AugmentedSet:
    """Draw ``cfg.m`` same-class convex combinations from ``data``.

    Class sizes in the output follow the labeled class proportions of
    ``data``. Each draw picks two distinct members of one class (the same
    member only for singleton classes) and mixes them with a weight from
    Beta(alpha, alpha); the label is the shared class. Unlabeled rows are
    ignored, so run ``pseudo_label`` first when they should take part.
    """
    counts = data.class_counts()
    if counts.sum() == 0:
        raise ValueError("no labeled samples to augment from")
    empty = [data.classes[c] for c in range(data.k) if counts[c] == 0]
    if empty:
        log.warning("classes %s have no labeled members and are skipped", empty)
    per_class = allocate_class_counts(counts, cfg.m)
    rng = np.random.default_rng(cfg.seed)

    pairs = np.empty((cfg.m, 2), dtype=np.int64)
    labels = np.empty(cfg.m, dtype=np.int64)
    start = 0
    for c in range(data.k):
        m_c = int(per_class[c])
        if m_c == 0:
            continue
        members = np.flatnonzero(data.y == c)
        size = len(members)
        j = rng.integers(0, size, m_c)
        if size == 1:
            k = j
        else:
            k = rng.integers(0, size - 1, m_c)
            k = k + (k >= j)
        pairs[start:start + m_c, 0] = members[j]
        pairs[start:start + m_c, 1] = members[k]
        labels[start:start + m_c] = c
        start += m_c

    lam = beta_sample(cfg.alpha, rng, cfg.m)
    X = lam[:, None] * data.X[pairs[:, 0]] + (1.0 - lam[:, None]) * data.X[pairs[:, 1]]
    # convex combination can leave the segment by one ulp; pin it back
    lo = np.minimum(data.X[pairs[:, 0]], data.X[pairs[:, 1]])
    hi = np.maximum(data.X[pairs[:, 0]], data.X[pairs[:, 1]])
    X = np.clip(X, lo, hi)
    ids = np.arange(cfg.m)
    out = Dataset(X, labels, data.k, f"{data.name}-mixup", ids, data.classes)
    return AugmentedSet(out, pairs, lam)


def pseudo_label(model, data: Dataset) -> Dataset:
    """Fill every unlabeled row with the model's prediction."""
    if model.d != data.d:
        raise ValueError(f"dimension mismatch: model d={model.d}, data d={data.d}")
    missing = ~data.labeled_mask
    if not missing.any():
        return data
    y = data.y.copy()
    y[missing] = model.predict(data.X[missing])
    return data.with_labels(y)
