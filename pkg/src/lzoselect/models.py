"""Candidate learners, the prediction contract and zero-one risk."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .core import Dataset
from .divergence import check_joint

KINDS = ("linear_svm", "majority", "nearest_neighbor")
MODEL_FORMAT_VERSION = 1
DEFAULT_EPOCHS = 20
DEFAULT_AVERAGE = True


@dataclass(frozen=True)
class LearnerSpec:
    kind: str
    hyperparams: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown learner kind {self.kind!r}")
        hp = dict(self.hyperparams)
        if self.kind == "linear_svm":
            if "C" not in hp:
                raise ValueError("linear_svm needs hyperparameter C")
            if not hp["C"] > 0:
                raise ValueError(f"C must be > 0, got {hp['C']}")
            if int(hp.get("epochs", DEFAULT_EPOCHS)) < 1:
                raise ValueError("epochs must be >= 1")
        object.__setattr__(self, "hyperparams", tuple(sorted(hp.items())))

    @classmethod
    def svm(cls, C: float, epochs: int = DEFAULT_EPOCHS,
            average: bool = DEFAULT_AVERAGE) -> "LearnerSpec":
        return cls("linear_svm", (("C", float(C)), ("epochs", epochs), ("average", int(average))))

    def get(self, name, default=None):
        return dict(self.hyperparams).get(name, default)

    def label(self) -> str:
        if not self.hyperparams:
            return self.kind
        args = ",".join(f"{k}={v:g}" for k, v in self.hyperparams)
        return f"{self.kind}({args})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "hyperparams": dict(self.hyperparams)}


@dataclass(frozen=True, eq=False)
class TrainedModel:
    """A fitted hypothesis.

    ``params`` depends on ``kind``: ``W`` (rows of weights) and ``b`` for
    ``linear_svm``, ``label`` for ``majority``, ``X``/``y`` for
    ``nearest_neighbor``. A binary linear model may carry a single weight
    row, in which case a positive decision value means class 1.
    """

    kind: str
    d: int
    k: int
    params: dict = field(repr=False)
    fingerprint: str = ""
    n_train: int = 0

    def decision_function(self, X) -> np.ndarray:
        X = self._check(X)
        if self.kind != "linear_svm":
            raise TypeError(f"{self.kind} has no decision function")
        scores = X @ self.params["W"].T + self.params["b"]
        if scores.shape[1] == 1 and self.k == 2:
            scores = np.hstack([-scores, scores])
        return scores

    def predict(self, X):
        """Class ids for a batch ``(n, d)`` or a single vector ``(d,)``."""
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        X = self._check(X)
        if self.kind == "linear_svm":
            out = np.argmax(self.decision_function(X), axis=1)
        elif self.kind == "majority":
            out = np.full(len(X), self.params["label"], dtype=np.int64)
        else:
            out = self.params["y"][_nearest(self.params["X"], X)]
        return int(out[0]) if single else out

    def _check(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.d:
            raise ValueError(f"dimension mismatch: model d={self.d}, input d={X.shape[1]}")
        return X

    def to_json(self) -> str:
        params = {k: np.asarray(v).tolist() for k, v in self.params.items()}
        return json.dumps({"version": MODEL_FORMAT_VERSION, "kind": self.kind, "d": self.d,
                           "k": self.k, "params": params, "fingerprint": self.fingerprint,
                           "n_train": self.n_train})

    @classmethod
    def from_json(cls, text: str) -> "TrainedModel":
        doc = json.loads(text)
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {doc.get('version')!r}")
        kinds = {"W": np.float64, "b": np.float64, "X": np.float64, "y": np.int64}
        params = {k: (np.asarray(v, dtype=kinds[k]) if k in kinds else v)
                  for k, v in doc["params"].items()}
        return cls(doc["kind"], doc["d"], doc["k"], params, doc["fingerprint"], doc["n_train"])


def _nearest(ref: np.ndarray, X: np.ndarray, chunk: int = 256) -> np.ndarray:
    # exact squared distances; argmin keeps the lowest index on ties
    out = np.empty(len(X), dtype=np.int64)
    for s in range(0, len(X), chunk):
        diff = X[s:s + chunk, None, :] - ref[None, :, :]
        out[s:s + chunk] = np.argmin(np.einsum("ijk,ijk->ij", diff, diff), axis=1)
    return out


@numba.njit(cache=True)
def _pegasos_ovr(X, Y, order, lam, avg_from):
    n, d = X.shape
    k = Y.shape[1]
    W = np.zeros((k, d + 1))
    S = np.zeros((k, d + 1))
    radius = 1.0 / math.sqrt(lam)
    T = order.shape[0]
    for t in range(1, T + 1):
        i = order[t - 1]
        eta = 1.0 / (lam * t)
        shrink = 1.0 - eta * lam
        for c in range(k):
            score = W[c, d]
            for j in range(d):
                score += W[c, j] * X[i, j]
            yc = Y[i, c]
            norm2 = 0.0
            if yc * score < 1.0:
                step = eta * yc
                for j in range(d):
                    W[c, j] = shrink * W[c, j] + step * X[i, j]
                    norm2 += W[c, j] * W[c, j]
                W[c, d] = shrink * W[c, d] + step
            else:
                for j in range(d):
                    W[c, j] = shrink * W[c, j]
                    norm2 += W[c, j] * W[c, j]
                W[c, d] = shrink * W[c, d]
            norm2 += W[c, d] * W[c, d]
            if norm2 > radius * radius:
                scale = radius / math.sqrt(norm2)
                for j in range(d + 1):
                    W[c, j] *= scale
        if t >= avg_from:
            for c in range(k):
                for j in range(d + 1):
                    S[c, j] += W[c, j]
    if avg_from > T:
        return W
    return S / (T - avg_from + 1)


def regularization(C: float, n: int) -> float:
    return 1.0 / (C * n)


def train(spec: LearnerSpec, data: Dataset, seed=0) -> TrainedModel:
    """Fit ``spec`` on a fully labeled dataset.

    ``linear_svm`` runs one-vs-rest Pegasos: lambda = 1/(C n), step
    1/(lambda t), ``epochs * n`` single-sample steps drawn uniformly with
    replacement and projection onto the ball of radius 1/sqrt(lambda). The
    returned weights are the mean of the last half of the iterates, or the
    final iterate when hyperparameter ``average`` is 0. The bias is an extra
    constant feature and is projected together with the weights.
    """
    if data.n < 1:
        raise ValueError("empty data")
    if not data.fully_labeled:
        raise ValueError("training data contains unlabeled samples")
    common = dict(d=data.d, k=data.k, fingerprint=data.fingerprint(), n_train=data.n)
    if spec.kind == "majority":
        label = int(np.argmax(data.class_counts()))
        return TrainedModel("majority", params={"label": label}, **common)
    if spec.kind == "nearest_neighbor":
        return TrainedModel("nearest_neighbor", params={"X": data.X, "y": data.y}, **common)

    C = spec.get("C")
    epochs = int(spec.get("epochs", DEFAULT_EPOCHS))
    lam = regularization(C, data.n)
    rng = np.random.default_rng(seed)
    order = rng.integers(0, data.n, epochs * data.n)
    Y = np.where(data.y[:, None] == np.arange(data.k)[None, :], 1.0, -1.0)
    T = len(order)
    avg_from = T // 2 + 1 if spec.get("average", DEFAULT_AVERAGE) else T + 1
    W = _pegasos_ovr(data.X, Y, order, lam, avg_from)
    return TrainedModel("linear_svm", params={"W": W[:, :-1].copy(), "b": W[:, -1].copy()},
                        **common)


def hinge_objective(model: TrainedModel, data: Dataset, lam: float) -> float:
    """Mean over classes of the regularized one-vs-rest hinge objective."""
    scores = model.decision_function(data.X)
    Y = np.where(data.y[:, None] == np.arange(model.k)[None, :], 1.0, -1.0)
    hinge = np.maximum(0.0, 1.0 - Y * scores).mean(axis=0)
    norms = (model.params["W"] ** 2).sum(axis=1) + model.params["b"] ** 2
    return float(np.mean(0.5 * lam * norms + hinge))


@dataclass(frozen=True)
class LossSpec:
    kind: str = "zero_one"
    B: float = 1.0

    def __post_init__(self):
        if self.kind != "zero_one":
            raise ValueError(f"unsupported loss {self.kind!r}")


ZERO_ONE = LossSpec()


def empirical_risk(model: TrainedModel, data: Dataset, loss: LossSpec = ZERO_ONE) -> float:
    """Mean zero-one loss of ``model`` on ``data``."""
    if data.n == 0:
        raise ValueError("empty data")
    if not data.fully_labeled:
        raise ValueError("risk needs fully labeled data")
    return float(np.mean(model.predict(data.X) != data.y))


def accuracy(model: TrainedModel, data: Dataset) -> float:
    return 1.0 - empirical_risk(model, data)


def exact_expected_risk(model: TrainedModel, joint, support_points) -> float:
    """Zero-one risk under a finite joint ``joint[y, s]`` over ``support_points[s]``."""
    joint = check_joint(joint)
    points = np.atleast_2d(np.asarray(support_points, dtype=np.float64))
    if points.shape[0] != joint.shape[1]:
        raise ValueError(f"{points.shape[0]} support points for a table with {joint.shape[1]} columns")
    if joint.shape[0] > model.k:
        raise ValueError("joint has more classes than the model")
    pred = model.predict(points)
    wrong = pred[None, :] != np.arange(joint.shape[0])[:, None]
    return float(np.sum(joint * wrong))
