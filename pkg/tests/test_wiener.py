from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import exact
from utfsr import networks as nw
from utfsr.graphs import skeleton
from utfsr.lti import FrequencyGrid, RationalTransfer, covariances_from_psd
from utfsr.model import Ldim, NoiseChannel, causal_graph, psd
from utfsr.oracle import gen_utf, ols_wiener
from utfsr.errors import TailTooHeavy
from utfsr.wiener import (
    DELAYED,
    PRESENT,
    RegressorSpec,
    causal_wiener,
    cwsep,
    noncausal_wiener,
    strictly_causal_component,
    wsep,
)

EPS = 1e-6


def cov(m, M=32, N=1024):
    return covariances_from_psd(psd(m, FrequencyGrid(N)), M)


class TestRegressorSpec:
    def test_columns(self):
        spec = RegressorSpec(0, ((1, PRESENT), (2, DELAYED)), maxlag=2)
        assert spec.columns() == [(1, 0), (1, 1), (1, 2), (2, 1), (2, 2)]

    def test_target_present_rejected(self):
        with pytest.raises(ValueError):
            RegressorSpec(0, ((0, PRESENT),))

    def test_target_delayed_allowed(self):
        RegressorSpec(0, ((0, DELAYED),))

    def test_duplicates_rejected(self):
        with pytest.raises(ValueError):
            RegressorSpec(0, ((1, PRESENT), (1, DELAYED)))


class TestNoncausal:
    def test_triangle_uncorrelated_ends(self, grid):
        res = noncausal_wiener(psd(nw.triangle_network(1, 1, -1), grid), 0, [2])
        assert res.component_norms[2] < 1e-12

    def test_independent_channels(self, grid):
        S = psd(Ldim(4, noise=[1.0, 2.0, 0.5, 3.0]), grid)
        res = noncausal_wiener(S, 1, [0, 2, 3])
        assert all(v < 1e-14 for v in res.component_norms.values())
        assert res.residual_variance == pytest.approx(2.0)

    def test_double_coparent_cancellation(self, grid):
        S = psd(nw.hidden_coparent(3.0), grid)
        res = noncausal_wiener(S, 1, [0, 2, 3, 4])
        assert res.margin(3) < EPS

    def test_coefficients_match_exact_regression(self, grid):
        # 3x3 conditional algebra on the constant spectrum
        Sigma = exact.covariance([[0, 0, 0], [1, 0, 0], [-1, 1, 0]], [1, 1, 1])
        S = psd(nw.triangle_network(1, 1, -1), grid)
        for target in range(3):
            others = [k for k in range(3) if k != target]
            for size in (1, 2):
                for regs in combinations(others, size):
                    w = exact.regression(Sigma, target, list(regs))
                    res = noncausal_wiener(S, target, regs)
                    for r in regs:
                        assert res.coefficients[(r, 0)] == pytest.approx(float(w[r]), abs=1e-12)
                        assert res.component_norms[r] == pytest.approx(abs(float(w[r])), abs=1e-12)

    def test_residual_not_above_variance(self, grid):
        S = psd(nw.diamond(), grid)
        res = noncausal_wiener(S, 2, [0, 1, 3])
        assert 0 <= res.residual_variance <= res.target_variance
        assert res.residual_variance == pytest.approx(1.0)  # e3 is unpredictable

    def test_dynamic_two_sided_filter(self):
        # y2 = z^-1 y1 + e2: estimating y1 from y2 needs the future of y2
        m = Ldim(2, {(0, 1): RationalTransfer.delay(1, 0.8)})
        res = noncausal_wiener(psd(m, FrequencyGrid(256)), 0, [1], max_lag=16)
        assert res.coefficients[(1, -1)] == pytest.approx(0.8 / 1.64, rel=1e-10)
        assert abs(res.coefficients[(1, 0)]) < 1e-14

    def test_slow_decay_raises_tail(self):
        m = Ldim(2, {(0, 1): RationalTransfer([1.0], [1.0, -0.97])})
        with pytest.raises(TailTooHeavy):
            noncausal_wiener(psd(m, FrequencyGrid(1024)), 1, [0], max_lag=16)


class TestCausal:
    def test_diamond_parent_only(self):
        spec = RegressorSpec(1, ((0, PRESENT), (3, PRESENT)), 32)
        res = causal_wiener(cov(nw.diamond()), spec)
        assert res.component_norms[3] < 1e-12
        assert res.coefficients[(0, 0)] == pytest.approx(1.0, abs=1e-12)
        assert res.residual_variance == pytest.approx(1.0, abs=1e-12)

    def test_white_target(self):
        R = cov(Ldim(3, {(0, 1): 1.0}))
        res = causal_wiener(R, RegressorSpec(2, ((0, PRESENT), (1, DELAYED)), 8))
        assert max(abs(c) for c in res.coefficients.values()) < 1e-14
        assert res.residual_variance == pytest.approx(res.target_variance)

    def test_cancelling_paths_hide_direct_edge(self):
        res = causal_wiener(cov(nw.diamond(2, 2, 2, -8)), RegressorSpec(2, ((3, PRESENT),), 32))
        assert res.margin(3) < EPS

    def test_first_order_iir_prediction(self):
        # AR(1) noise with pole 0.5: predictor from own past is 0.5 at lag 1 and 0 beyond
        m = Ldim(1, noise=[NoiseChannel(1.0, RationalTransfer([1.0], [1.0, -0.5]))])
        res = causal_wiener(cov(m, 16, 256), RegressorSpec(0, ((0, DELAYED),), 16))
        assert res.coefficients[(0, 1)] == pytest.approx(0.5, abs=1e-12)
        assert max(abs(res.coefficients[(0, k)]) for k in range(2, 17)) < 1e-12
        assert res.residual_variance == pytest.approx(1.0)

    def test_near_duplicate_regressor_gets_ridge(self):
        # y2 = y1 + tiny noise; present y1, y2 make the Gram matrix nearly singular
        m = Ldim(3, {(0, 1): 1.0}, [1.0, 1e-14, 1.0])
        res = causal_wiener(cov(m, 4, 64), RegressorSpec(2, ((0, PRESENT), (1, PRESENT)), 4))
        assert res.regularized

    def test_covariance_range_checked(self):
        with pytest.raises(ValueError):
            causal_wiener(cov(nw.diamond(), 8), RegressorSpec(1, ((0, PRESENT),), 16))


class TestSeparation:
    def test_wsep_triangle_marginal(self, grid):
        S = psd(nw.triangle_network(1, 1, -1), grid)
        assert wsep(S, 0, [], 2).separated

    def test_wsep_triangle_given_middle(self, grid):
        # conditioning on the collider y2 couples y1 and y3: coefficient -1/3
        S = psd(nw.triangle_network(1, 1, -1), grid)
        v = wsep(S, 0, [1], 2)
        assert not v.separated
        assert v.result.coefficients[(2, 0)] == pytest.approx(-1 / 3, abs=1e-12)

    def test_wsep_direct_parent(self, grid):
        assert not wsep(psd(Ldim(2, {(0, 1): 2.0}), grid), 1, [], 0).separated

    def test_wsep_coparent_link(self, diamond_psd):
        assert not wsep(diamond_psd, 1, [0, 2], 3).separated

    def test_cwsep_diamond(self):
        assert cwsep(cov(nw.diamond()), 1, [0], 3).separated

    def test_cwsep_self_memory(self):
        m = Ldim(1, noise=[NoiseChannel(1.0, RationalTransfer([1.0], [1.0, -0.5]))])
        v = cwsep(cov(m, 16, 256), 0, [], 0, delayed=True, max_lag=16)
        assert not v.separated

    def test_cwsep_rejects_overlap(self):
        with pytest.raises(ValueError):
            cwsep(cov(nw.diamond()), 1, [3], 3)

    def test_four_cycle_stable_variant(self):
        R = cov(nw.four_cycle(g41=0.25))
        assert cwsep(R, 4, [], 3).separated
        assert cwsep(R, 4, [], 3, delayed=True).separated
        # the past of y5 reaches y4 through y1 -> y2 -> y3 -> y4
        assert not cwsep(R, 3, [], 4, delayed=True).separated

    def test_strictly_causal_after_conditioning(self):
        assert strictly_causal_component(cov(nw.diamond()), 1, 3, [0]).separated

    def test_direct_feedthrough_not_strictly_causal(self):
        v = strictly_causal_component(cov(Ldim(2, {(0, 1): 2.0})), 1, 0)
        assert not v.separated
        assert v.result.coefficients[(0, 0)] == pytest.approx(2.0)

    def test_independent_trivially_strictly_causal(self):
        assert strictly_causal_component(cov(Ldim(2)), 1, 0).separated

    def test_verdict_serializable(self):
        d = cwsep(cov(nw.diamond()), 1, [0], 3).as_dict()
        assert d["separated"] is True and d["witness"]["target"] == 1


class TestProperties:
    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 10_000), data=st.data())
    def test_relabeling_permutes_results(self, seed, data):
        n = 5
        m = gen_utf(n, 0.4, 0.4, seed)
        perm = data.draw(st.permutations(range(n)))
        mp = Ldim(n, {(perm[i], perm[j]): t for (i, j), t in m.dynamics.items()})
        R, Rp = cov(m, 16, 512), cov(mp, 16, 512)
        target = data.draw(st.integers(0, n - 1))
        others = [k for k in range(n) if k != target]
        entries = tuple((k, data.draw(st.sampled_from([PRESENT, DELAYED]))) for k in others[:3])
        a = causal_wiener(R, RegressorSpec(target, entries, 16))
        b = causal_wiener(Rp, RegressorSpec(perm[target], tuple((perm[k], c) for k, c in entries), 16))
        for (node, lag), coef in a.coefficients.items():
            assert b.coefficients[(perm[node], lag)] == pytest.approx(coef, abs=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10_000), n=st.integers(3, 7))
    def test_skeleton_edges_never_separated(self, seed, n):
        m = gen_utf(n, 0.35, 0.3, seed)
        S = psd(m, FrequencyGrid(512))
        for i, j in skeleton(causal_graph(m)).edges:
            rest = [k for k in range(n) if k not in (i, j)]
            assert not wsep(S, j, rest, i).separated

    @pytest.mark.slow
    def test_matches_least_squares_on_simulations(self):
        T, M = 10**6, 24
        rng = np.random.default_rng(99)
        for k in range(25):
            n = int(rng.integers(2, 6))
            m = gen_utf(n, 0.5, 0.4, seed=500 + k)
            target = int(rng.integers(n))
            others = [v for v in range(n) if v != target]
            entries = tuple((v, PRESENT if rng.random() < 0.5 else DELAYED) for v in others)
            if rng.random() < 0.5:
                entries += ((target, DELAYED),)
            spec = RegressorSpec(target, entries, M)
            exact_fit = causal_wiener(cov(m, M), spec)
            est = ols_wiener(m, spec, T, seed=k)
            for key, coef in exact_fit.coefficients.items():
                tol = max(1e-3, 5 * est.standard_errors[key])
                assert abs(est.coefficients[key] - coef) < tol, (k, key)


class TestPastGivenPresent:
    def test_static_gain_has_no_past_component(self):
        R = cov(Ldim(2, {(0, 1): 2.0}))
        v = cwsep(R, 1, [(0, PRESENT)], 0, delayed=True)
        assert v.separated
        assert v.witness.present == (0,) and v.witness.delayed == ()

    def test_moving_average_has_past_component(self):
        R = cov(Ldim(2, {(0, 1): RationalTransfer([1.0, 0.5])}))
        assert not cwsep(R, 1, [(0, PRESENT)], 0, delayed=True).separated

    def test_requires_delayed_test(self):
        R = cov(Ldim(2, {(0, 1): 2.0}))
        with pytest.raises(ValueError):
            cwsep(R, 1, [(0, PRESENT)], 0)
