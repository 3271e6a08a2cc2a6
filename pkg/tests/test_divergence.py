import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lzoselect import Dataset
from lzoselect.divergence import (BoundInputs, bound_record, corollary1_bound,
                                  histogram_js_estimate, js, js_conditional_decomposition, kl,
                                  kl_chain_terms, linear_vc_dimension, theorem1_bound, vc_term)

LN2 = math.log(2.0)

# 30-digit values from an independent mpmath evaluation
KL_HALF_VS_3Q = 0.143841036225890463719609502997
JS_HALF_VS_3Q = 0.0338220755686052300003735989209
VC_TERM_150_3_005 = 0.751842841603450274616135772531


def _simplex(size):
    return (arrays(np.float64, size, elements=st.floats(0.0, 1.0))
            .filter(lambda a: a.sum() > 1e-3)
            .map(lambda a: a / a.sum()))


pairs = st.integers(1, 8).flatmap(lambda s: st.tuples(_simplex(s), _simplex(s)))


class TestOracles:
    def test_kl(self):
        assert kl([0.5, 0.5], [0.75, 0.25]) == pytest.approx(KL_HALF_VS_3Q, abs=1e-12)

    def test_js(self):
        assert js([0.5, 0.5], [0.75, 0.25]) == pytest.approx(JS_HALF_VS_3Q, abs=1e-12)

    def test_disjoint_supports(self):
        assert js([1.0, 0.0], [0.0, 1.0]) == pytest.approx(LN2, abs=1e-12)

    def test_kl_support_failure(self):
        assert kl([0.5, 0.5], [1.0, 0.0]) == math.inf

    def test_kl_zero_mass_in_p(self):
        assert kl([1.0, 0.0], [0.5, 0.5]) == pytest.approx(LN2, abs=1e-15)

    def test_vc_term(self):
        b = theorem1_bound(BoundInputs(1.0, 150, 3, 0.05, 0.0))
        assert b == pytest.approx(VC_TERM_150_3_005, abs=1e-12)

    def test_theorem1_with_shift(self):
        b = theorem1_bound(BoundInputs(1.0, 150, 3, 0.05, JS_HALF_VS_3Q))
        assert b == pytest.approx(VC_TERM_150_3_005 + math.sqrt(JS_HALF_VS_3Q / 2), abs=1e-12)


class TestValidation:
    @pytest.mark.parametrize("P,Q", [([0.5, 0.6], [0.5, 0.5]), ([-0.1, 1.1], [0.5, 0.5]),
                                     ([1.0], [0.5, 0.5]), ([np.nan, 1.0], [0.5, 0.5])])
    def test_bad_inputs(self, P, Q):
        with pytest.raises(ValueError):
            js(P, Q)

    def test_bad_bound_inputs(self):
        with pytest.raises(ValueError):
            BoundInputs(1.0, 1, 100, 0.05, 0.0)
        with pytest.raises(ValueError):
            BoundInputs(1.0, 100, 3, 1.0, 0.0)
        with pytest.raises(ValueError):
            BoundInputs(-1.0, 100, 3, 0.5, 0.0)

    def test_record(self):
        rec = bound_record(BoundInputs(1.0, 150, 3, 0.05, 0.0), "corollary1")
        assert rec["kind"] == "corollary1"
        assert rec["bound"] == pytest.approx(VC_TERM_150_3_005, abs=1e-12)
        with pytest.raises(ValueError):
            bound_record(BoundInputs(1.0, 150, 3, 0.05, 0.0), "other")


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(pairs)
    def test_js_symmetry_and_range(self, pq):
        P, Q = pq
        a, b = js(P, Q), js(Q, P)
        assert a == pytest.approx(b, abs=1e-12)
        assert 0.0 <= a <= LN2

    @settings(max_examples=100, deadline=None)
    @given(_simplex(6))
    def test_identity(self, P):
        assert js(P, P) <= 1e-12
        assert kl(P, P) == 0.0

    @settings(max_examples=100, deadline=None)
    @given(pairs)
    def test_js_below_mean_kl(self, pq):
        P, Q = pq
        assert js(P, Q) <= 0.5 * (kl(P, Q) + kl(Q, P)) + 1e-12 or math.isinf(kl(P, Q))


class TestDecomposition:
    def test_equal_joints(self):
        P = np.full((2, 3), 1 / 6)
        d = js_conditional_decomposition(P, P)
        assert d.D == pytest.approx(0.0, abs=1e-7)

    def test_label_only_shift(self):
        P = np.array([[0.3, 0.3], [0.2, 0.2]])
        Q = np.array([[0.1, 0.1], [0.4, 0.4]])
        d = js_conditional_decomposition(P, Q)
        assert d.cond_term == pytest.approx(0.0, abs=1e-15)
        assert d.label_js == pytest.approx(js([0.6, 0.4], [0.2, 0.8]), abs=1e-15)

    def test_zero_mass_class(self):
        P = np.array([[0.5, 0.5], [0.0, 0.0]])
        Q = np.array([[0.25, 0.25], [0.25, 0.25]])
        d = js_conditional_decomposition(P, Q)
        assert d.cond_term == 0.0
        assert math.sqrt(js(P.ravel(), Q.ravel())) <= d.D + 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            js_conditional_decomposition(np.full((2, 2), 0.25), np.full((1, 4), 0.25))

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
    def test_sqrt_js_below_d(self, k, s, seed):
        rng = np.random.default_rng(seed)
        P = rng.dirichlet(np.ones(k * s)).reshape(k, s)
        Q = rng.dirichlet(np.ones(k * s)).reshape(k, s)
        d = js_conditional_decomposition(P, Q)
        assert math.sqrt(js(P.ravel(), Q.ravel())) <= d.D + 1e-9

    @settings(max_examples=100, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
    def test_kl_chain_rule(self, k, s, seed):
        rng = np.random.default_rng(seed)
        P = rng.dirichlet(np.ones(k * s)).reshape(k, s)
        Q = rng.dirichlet(np.ones(k * s)).reshape(k, s)
        M = 0.5 * (P + Q)
        cond, marginal = kl_chain_terms(P, M)
        assert cond + marginal == pytest.approx(kl(P.ravel(), M.ravel()), abs=1e-9)


class TestBounds:
    def test_vc_term_decreasing_in_m(self):
        values = [vc_term(m, 5, 0.05) for m in (10, 100, 1000, 10000)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_theorem1_increasing_in_js(self):
        values = [theorem1_bound(BoundInputs(1.0, 200, 3, 0.1, j)) for j in (0.0, 0.1, 0.5)]
        assert values == sorted(values)

    def test_corollary_dominates_theorem(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            P = rng.dirichlet(np.ones(6)).reshape(2, 3)
            Q = rng.dirichlet(np.ones(6)).reshape(2, 3)
            t = theorem1_bound(BoundInputs(1.0, 100, 3, 0.1, js(P.ravel(), Q.ravel())))
            c = corollary1_bound(BoundInputs(1.0, 100, 3, 0.1,
                                             js_conditional_decomposition(P, Q).D))
            assert t <= c + 1e-12

    @pytest.mark.parametrize("d,v", [(1, 2), (2, 3), (241, 242)])
    def test_linear_vc(self, d, v):
        assert linear_vc_dimension(d) == v


class TestHistogramHeuristic:
    def test_identical_sets(self, iris):
        assert histogram_js_estimate(iris, iris) == 0.0

    def test_shifted_sets(self):
        a = Dataset(np.linspace(0, 1, 50)[:, None], [0] * 50, 1)
        b = a.with_features(a.X + 10.0)
        assert histogram_js_estimate(a, b, bins=4) == pytest.approx(LN2, abs=1e-12)

    def test_bad_bins(self, iris):
        with pytest.raises(ValueError):
            histogram_js_estimate(iris, iris, bins=1)
