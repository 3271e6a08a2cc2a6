import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from lzoselect import Dataset, LearnerSpec, MixupConfig, label_invariant_mixup, label_marginal
from lzoselect.augment import (allocate_class_counts, beta_sample, gamma_sample, mixup_pair,
                               pseudo_label)
from lzoselect.divergence import js
from lzoselect.models import train

# class sizes of common small benchmark sets, used only for rounding checks
CLASS_COUNTS = {
    "iris": [50, 50, 50],
    "wine": [59, 71, 48],
    "sonar": [97, 111],
    "glass": [70, 76, 17, 13, 9, 29],
    "balance": [49, 288, 288],
    "vehicle": [212, 217, 218, 199],
    "ionosphere": [126, 225],
    "wdbc": [212, 357],
}


def _oracle_counts(counts, m):
    # independent largest-remainder rounding with Fractions
    from fractions import Fraction
    n = sum(counts)
    quotas = [Fraction(m * c, n) for c in counts]
    base = [q.numerator // q.denominator for q in quotas]
    rest = m - sum(base)
    order = sorted(range(len(counts)), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:rest]:
        base[i] += 1
    return base


class TestMixupPair:
    def test_examples(self):
        np.testing.assert_array_equal(mixup_pair([0, 0], [2, 4], 0.25), [1.5, 3.0])
        np.testing.assert_array_equal(mixup_pair([1, 2], [3, 4], 1.0), [1, 2])
        np.testing.assert_array_equal(mixup_pair([1, 2], [3, 4], 0.0), [3, 4])

    def test_errors(self):
        with pytest.raises(ValueError, match="dimension"):
            mixup_pair([0, 0], [0, 0, 0], 0.5)
        with pytest.raises(ValueError):
            mixup_pair([0], [1], 1.5)


class TestSamplers:
    def test_beta_uniform_ks(self):
        lam = beta_sample(1.0, np.random.default_rng(0), 100_000)
        assert stats.kstest(lam, "uniform").pvalue > 0.01

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 2.0, 5.0])
    def test_beta_ks(self, alpha):
        lam = beta_sample(alpha, np.random.default_rng(1), 20_000)
        assert stats.kstest(lam, stats.beta(alpha, alpha).cdf).pvalue > 0.001

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 3.5])
    def test_gamma_ks(self, alpha):
        g = gamma_sample(alpha, np.random.default_rng(2), 20_000)
        assert stats.kstest(g, stats.gamma(alpha).cdf).pvalue > 0.001

    def test_tiny_alpha_stays_in_range(self):
        lam = beta_sample(0.01, np.random.default_rng(3), 10_000)
        assert np.all((lam >= 0) & (lam <= 1))
        edge = 2 * stats.beta(0.01, 0.01).cdf(1e-6)
        assert np.mean((lam < 1e-6) | (lam > 1 - 1e-6)) == pytest.approx(edge, abs=0.02)

    def test_scalar(self):
        assert isinstance(beta_sample(1.0, np.random.default_rng(0)), float)


class TestAllocation:
    def test_example(self):
        assert allocate_class_counts([100, 50], 150).tolist() == [100, 50]

    @pytest.mark.parametrize("name", sorted(CLASS_COUNTS))
    @pytest.mark.parametrize("factor", [1, 10, 7.3])
    def test_matches_oracle(self, name, factor):
        counts = CLASS_COUNTS[name]
        m = int(round(factor * sum(counts))) + 3
        got = allocate_class_counts(counts, m).tolist()
        assert got == _oracle_counts(counts, m)
        n = sum(counts)
        assert js(np.array(got) / m, np.array(counts) / n) < 1e-4

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 50), min_size=1, max_size=6).filter(lambda c: sum(c) > 0),
           st.integers(1, 2000))
    def test_within_one(self, counts, m):
        got = allocate_class_counts(counts, m)
        assert got.sum() == m
        exact = m * np.array(counts) / sum(counts)
        assert np.all(np.abs(got - exact) < 1)


class TestLabelInvariantMixup:
    def test_size_and_provenance(self, iris, tmp_path):
        V = label_invariant_mixup(iris, MixupConfig(300, 1.0, 0))
        assert V.data.n == 300
        assert V.data.class_counts().tolist() == [100, 100, 100]
        np.testing.assert_array_equal(iris.y[V.pairs[:, 0]], V.data.y)
        np.testing.assert_array_equal(iris.y[V.pairs[:, 1]], V.data.y)
        assert np.all(V.pairs[:, 0] != V.pairs[:, 1])
        expected = V.lam[:, None] * iris.X[V.pairs[:, 0]] + (1 - V.lam[:, None]) * iris.X[V.pairs[:, 1]]
        np.testing.assert_allclose(V.data.X, expected, rtol=0, atol=1e-12)
        V.write_provenance(tmp_path / "p.jsonl")
        lines = (tmp_path / "p.jsonl").read_text().splitlines()
        assert len(lines) == 300
        assert set(json.loads(lines[0])) == {"j", "k", "lambda"}

    def test_singleton_class(self):
        data = Dataset([[0.0], [1.0], [2.0], [5.0]], [0, 0, 0, 1], 2)
        V = label_invariant_mixup(data, MixupConfig(8, 1.0, 0))
        ones = V.data.y == 1
        assert ones.sum() == 2
        np.testing.assert_array_equal(V.data.X[ones], [[5.0], [5.0]])

    def test_deterministic(self, wine):
        a = label_invariant_mixup(wine, MixupConfig(100, 0.5, 9))
        b = label_invariant_mixup(wine, MixupConfig(100, 0.5, 9))
        np.testing.assert_array_equal(a.data.X, b.data.X)
        c = label_invariant_mixup(wine, MixupConfig(100, 0.5, 10))
        assert not np.array_equal(a.data.X, c.data.X)

    def test_marginal_close(self, wine):
        V = label_invariant_mixup(wine, MixupConfig(10 * wine.n, 1.0, 0))
        assert js(label_marginal(V.data), label_marginal(wine)) < 1e-4

    def test_bad_config(self):
        with pytest.raises(ValueError):
            MixupConfig(0)
        with pytest.raises(ValueError):
            MixupConfig(5, alpha=0.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1), st.integers(1, 200), st.floats(0.05, 5.0))
    def test_convexity(self, seed, m, alpha):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(30, 3))
        y = rng.integers(0, 3, 30)
        data = Dataset(X, y, 3)
        V = label_invariant_mixup(data, MixupConfig(m, alpha, seed))
        a, b = X[V.pairs[:, 0]], X[V.pairs[:, 1]]
        assert np.all(V.data.X >= np.minimum(a, b))
        assert np.all(V.data.X <= np.maximum(a, b))
        assert np.all(y[V.pairs[:, 0]] == V.data.y)


class TestPseudoLabel:
    def test_fills_unlabeled(self, two_clusters):
        model = train(LearnerSpec("nearest_neighbor"), two_clusters)
        partial = two_clusters.with_labels(np.where(np.arange(20) % 2 == 0, two_clusters.y, -1))
        filled = pseudo_label(model, partial)
        assert filled.fully_labeled
        np.testing.assert_array_equal(filled.y, two_clusters.y)

    def test_dimension_mismatch(self, two_clusters, iris):
        model = train(LearnerSpec("majority"), two_clusters)
        with pytest.raises(ValueError, match="dimension"):
            pseudo_label(model, iris)
