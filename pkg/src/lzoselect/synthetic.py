"""Finite-domain tasks where the true risk and JS divergence are exact."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import models
from .core import Dataset
from .divergence import BoundInputs, js, linear_vc_dimension, theorem1_bound
from .models import LearnerSpec


@dataclass(frozen=True)
class DiscreteTask:
    """Joint ``table[y, s]`` over class ``y`` and support point ``points[s]``."""

    points: np.ndarray
    table: np.ndarray

    @property
    def k(self) -> int:
        return self.table.shape[0]

    def sample(self, n: int, rng: np.random.Generator, name: str = "synthetic") -> Dataset:
        flat = rng.choice(self.table.size, size=n, p=self.table.ravel())
        y, s = np.divmod(flat, self.table.shape[1])
        return Dataset(self.points[s], y, self.k, name)

    def empirical(self, data: Dataset) -> np.ndarray:
        """Joint table of ``data``, whose rows must be support points."""
        index = {tuple(p): s for s, p in enumerate(self.points)}
        table = np.zeros_like(self.table)
        for x, y in zip(data.X, data.y):
            table[y, index[tuple(x)]] += 1
        return table / table.sum()


def grid_task(seed, side: int = 4, noise: float = 4.0) -> DiscreteTask:
    """Two classes on a ``side x side`` grid in [0, 1]^2.

    Point masses are Dirichlet(1) and P(y = 1 | x) is a logistic function of
    a random direction, so the task is close to linear but not separable.
    """
    rng = np.random.default_rng(seed)
    ticks = np.linspace(0.0, 1.0, side)
    points = np.array([(a, b) for a in ticks for b in ticks])
    px = rng.dirichlet(np.ones(len(points)))
    w = rng.normal(size=2)
    score = (points - 0.5) @ w
    p1 = expit(noise * score)
    table = np.vstack([px * (1.0 - p1), px * p1])
    return DiscreteTask(points, table / table.sum())


def bound_check(seed, n: int = 100, m: int = 200, delta: float = 0.1, C: float = 1.0) -> dict:
    """One trial of the bias-bound check on a random grid task.

    The validation distribution Q is the empirical joint of the training
    sample (mix-up with identical endpoints), so V stays on the finite
    support and JS(P || Q) is exact. Returns the gap
    ``|L_P(G) - L(G, V)|`` next to the bound.
    """
    rng = np.random.default_rng(seed)
    task = grid_task(rng.integers(2 ** 32))
    train = task.sample(n, rng)
    model = models.train(LearnerSpec.svm(C), train, rng.integers(2 ** 32))
    Q = task.empirical(train)
    val = DiscreteTask(task.points, Q).sample(m, rng, "validation")
    true_risk = models.exact_expected_risk(model, task.table, task.points)
    val_risk = models.empirical_risk(model, val)
    divergence = js(task.table.ravel(), Q.ravel())
    bound = theorem1_bound(BoundInputs(1.0, m, linear_vc_dimension(2), delta, divergence))
    gap = abs(true_risk - val_risk)
    return {"seed": seed, "true_risk": true_risk, "val_risk": val_risk, "js": divergence,
            "gap": gap, "bound": bound, "violated": gap > bound}
