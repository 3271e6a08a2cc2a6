"""Exact KL/JS divergences on finite supports and the estimation-bias bounds.

All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .core import Dataset

NORM_TOL = 1e-12
LN2 = math.log(2.0)


def check_distribution(p, name: str = "distribution") -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d array")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(p.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"{name} sums to {p.sum()!r}, not 1")
    return p


def check_joint(table, name: str = "joint") -> np.ndarray:
    """Validate a (classes x feature-support) joint probability table."""
    t = np.asarray(table, dtype=np.float64)
    if t.ndim != 2 or t.size == 0:
        raise ValueError(f"{name} must be a nonempty 2-d table")
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError(f"{name} has negative or non-finite entries")
    if abs(t.sum() - 1.0) > NORM_TOL:
        raise ValueError(f"{name} sums to {t.sum()!r}, not 1")
    return t


def _pair(P, Q):
    P = check_distribution(P, "P")
    Q = check_distribution(Q, "Q")
    if P.shape != Q.shape:
        raise ValueError(f"support mismatch: {P.size} vs {Q.size}")
    return P, Q


def _kl(P: np.ndarray, Q: np.ndarray) -> float:
    support = P > 0
    if np.any(Q[support] == 0):
        return math.inf
    p = P[support]
    return max(float(np.sum(p * (np.log(p) - np.log(Q[support])))), 0.0)


def kl(P, Q) -> float:
    """KL(P || Q); +inf when P puts mass where Q has none."""
    return _kl(*_pair(P, Q))


def _js(P: np.ndarray, Q: np.ndarray) -> float:
    M = 0.5 * (P + Q)
    return min(0.5 * (_kl(P, M) + _kl(Q, M)), LN2)


def js(P, Q) -> float:
    """Jensen-Shannon divergence against the equal mixture; in [0, ln 2]."""
    return _js(*_pair(P, Q))


def _conditionals(table: np.ndarray):
    marginal = table.sum(axis=1)
    cond = np.zeros_like(table)
    nz = marginal > 0
    cond[nz] = table[nz] / marginal[nz, None]
    cond[nz] /= cond[nz].sum(axis=1, keepdims=True)
    return marginal, cond


class Decomposition(NamedTuple):
    D: float
    label_js: float
    cond_term: float


def js_conditional_decomposition(P, Q) -> Decomposition:
    """Split the joint divergence into label-marginal and class-conditional parts.

    ``cond_term`` is E_{y~P(y)} JS(P(x|y), Q(x|y)) + E_{y~Q(y)} JS(P(x|y), Q(x|y))
    and ``D = sqrt(cond_term) + sqrt(label_js)``. A class with zero mass under
    either marginal has an undefined conditional there and contributes 0.
    """
    P = check_joint(P, "P")
    Q = check_joint(Q, "Q")
    if P.shape != Q.shape:
        raise ValueError(f"shape mismatch: {P.shape} vs {Q.shape}")
    py, pc = _conditionals(P)
    qy, qc = _conditionals(Q)
    py = py / py.sum()
    qy = qy / qy.sum()
    cond = 0.0
    for y in range(P.shape[0]):
        if py[y] > 0 and qy[y] > 0:
            cond += (py[y] + qy[y]) * _js(pc[y], qc[y])
    label_js = _js(py, qy)
    return Decomposition(math.sqrt(cond) + math.sqrt(label_js), label_js, cond)


def kl_chain_terms(P, M) -> tuple[float, float]:
    """Return (E_{y~P(y)} KL(P(x|y) || M(x|y)), KL(P(y) || M(y))).

    Their sum equals KL of the joints whenever the joint KL is finite.
    """
    P = check_joint(P, "P")
    M = check_joint(M, "M")
    if P.shape != M.shape:
        raise ValueError(f"shape mismatch: {P.shape} vs {M.shape}")
    py, pc = _conditionals(P)
    my, mc = _conditionals(M)
    cond = 0.0
    for y in range(P.shape[0]):
        if py[y] > 0:
            cond += py[y] * _kl(pc[y], mc[y])
    return cond, _kl(py, my)


@dataclass(frozen=True)
class BoundInputs:
    """Arguments of the bias bounds.

    ``B`` is the loss range, ``m`` the validation size, ``v`` the VC dimension
    and ``divergence_term`` either a JS value or the decomposed ``D``.
    """

    B: float
    m: int
    v: int
    delta: float
    divergence_term: float

    def __post_init__(self):
        if self.B < 0:
            raise ValueError("B must be >= 0")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.v < 1:
            raise ValueError("v must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if not self.divergence_term >= 0:
            raise ValueError("divergence_term must be >= 0")
        if 2.0 * math.e * self.m / self.v <= 1.0:
            raise ValueError("need 2*e*m/v > 1 for the VC term")


def vc_term(m: int, v: int, delta: float) -> float:
    return math.sqrt(4.0 / m * (v * math.log(2.0 * math.e * m / v) + math.log(4.0 / delta)))


def theorem1_bound(inputs: BoundInputs) -> float:
    """(B / sqrt 2) * sqrt(JS) + sqrt((4/m)(v ln(2em/v) + ln(4/delta)))."""
    shift = inputs.B / math.sqrt(2.0) * math.sqrt(inputs.divergence_term)
    return shift + vc_term(inputs.m, inputs.v, inputs.delta)


def corollary1_bound(inputs: BoundInputs) -> float:
    """Same as :func:`theorem1_bound` with the decomposed ``D`` in place of sqrt(JS)."""
    shift = inputs.B / math.sqrt(2.0) * inputs.divergence_term
    return shift + vc_term(inputs.m, inputs.v, inputs.delta)


def bound_record(inputs: BoundInputs, kind: str = "theorem1") -> dict:
    if kind == "theorem1":
        value = theorem1_bound(inputs)
    elif kind == "corollary1":
        value = corollary1_bound(inputs)
    else:
        raise ValueError(f"unknown bound kind {kind!r}")
    return {**asdict(inputs), "bound": value, "kind": kind}


def linear_vc_dimension(d: int) -> int:
    if d < 1:
        raise ValueError("d must be >= 1")
    return d + 1


def histogram_js_estimate(A: Dataset, B: Dataset, bins: int = 8) -> float:
    """Mean over features of the JS between per-feature histograms.

    A product-marginal heuristic: it ignores feature dependence and is not a
    consistent estimator of the joint divergence. Bins are equal width over
    the pooled range of each feature.
    """
    if A.d != B.d:
        raise ValueError(f"dimension mismatch: {A.d} vs {B.d}")
    if bins < 2:
        raise ValueError("bins must be >= 2")
    values = []
    for t in range(A.d):
        a, b = A.X[:, t], B.X[:, t]
        lo = min(a.min(), b.min())
        hi = max(a.max(), b.max())
        if hi <= lo:
            values.append(0.0)
            continue
        edges = np.linspace(lo, hi, bins + 1)
        ha = np.histogram(a, edges)[0].astype(np.float64)
        hb = np.histogram(b, edges)[0].astype(np.float64)
        values.append(_js(ha / ha.sum(), hb / hb.sum()))
    return float(np.mean(values))
