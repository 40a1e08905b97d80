import math

import numpy as np
import pytest

from pgev import dist, gof, mle, specfun
from pgev.dist import ModelParams

U3 = [0.25, 0.5, 0.75]


def _a2_by_hand(u):
    n = len(u)
    s = sum((2 * i - 1) * math.log(ui) + (2 * n + 1 - 2 * i) * math.log(1 - ui)
            for i, ui in enumerate(u, start=1))
    return -n - s / n


class TestStatistics:
    def test_hand_values(self):
        r = gof.compute_statistics(U3)
        assert r.w2 == pytest.approx(0.0416667, abs=1e-6)
        assert r.w2 == pytest.approx(1 / 24, abs=1e-15)
        assert r.a2 == pytest.approx(0.2694300, abs=1e-6)
        assert r.a2 == pytest.approx(_a2_by_hand(U3), abs=1e-14)
        assert r.c_modified == pytest.approx(0.0486111, abs=1e-6)
        # 0.4041450 is 0.2694300 * 1.5; with the unrounded a2 the product is 0.4041463
        assert r.a_modified == pytest.approx(1.5 * _a2_by_hand(U3), abs=1e-14)
        assert r.a_modified == pytest.approx(0.4041450, abs=2e-6)
        assert r.n == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_modification_factors(self, seed):
        u = np.sort(np.random.default_rng(seed).uniform(size=17))
        r = gof.compute_statistics(u)
        n = 17
        assert r.c_modified / r.w2 == pytest.approx(1 + 0.5 / n, rel=1e-15)
        assert r.a_modified / r.a2 == pytest.approx(1 + 0.75 / n + 2.25 / n**2, rel=1e-15)
        assert r.w2 >= 1 / (12 * n)

    @pytest.mark.parametrize("seed", range(5))
    def test_reflection_symmetry(self, seed):
        u = np.sort(np.random.default_rng(seed).uniform(size=25))
        a = gof.compute_statistics(u)
        b = gof.compute_statistics((1 - u)[::-1])
        assert a.w2 == pytest.approx(b.w2, abs=1e-12)
        assert a.a2 == pytest.approx(b.a2, abs=1e-12)

    def test_errors(self):
        with pytest.raises(gof.GofError):
            gof.compute_statistics([0.5, 0.2])
        with pytest.raises(gof.GofError):
            gof.compute_statistics([0.0, 0.5])
        with pytest.raises(gof.GofError):
            gof.compute_statistics([0.5, 1.0])
        with pytest.raises(gof.GofError):
            gof.compute_statistics([])


class TestUniformize:
    def test_two_points(self):
        u = gof.uniformize([3.0, 1.0], lambda x: x / 4)
        np.testing.assert_allclose(u, [0.2397501, 0.7602499], atol=1e-7)
        np.testing.assert_allclose(u, specfun.std_normal_cdf(np.array([-1, 1]) / math.sqrt(2)),
                                   atol=1e-15)

    def test_true_cdf_near_uniform(self):
        params = ModelParams.pgev(4.36, 0.285, -0.24, 1)
        x = dist.sample(params, 10**4, np.random.default_rng(1))
        u = gof.uniformize(x, lambda v: dist.cdf(params, v))
        n = u.size
        grid = np.arange(1, n + 1) / n
        assert np.max(np.abs(grid - u)) < 0.02

    def test_monotone(self):
        x = np.array([0.5, 1.5, 2.5, 3.0, 7.0])
        u = gof.uniformize(x[::-1], lambda v: 1 - np.exp(-v))
        assert np.all(np.diff(u) > 0)

    def test_outside_support(self):
        with pytest.raises(gof.GofError, match="5.0"):
            gof.uniformize([1.0, 5.0], lambda v: np.minimum(v / 4, 1.0))
        with pytest.raises(gof.GofError):
            gof.uniformize([2.0, 2.0], lambda v: v / 4)


class TestGofTest:
    def test_composition(self):
        params = ModelParams.gev(10, 2, 0.1)
        x = dist.sample(params, 135, np.random.default_rng(4))
        direct = gof.compute_statistics(gof.uniformize(x, lambda v: dist.cdf(params, v)))
        assert gof.gof_test(x, params) == direct

    def test_decisions(self, critical_values):
        assert gof.critical_value(critical_values, "C", 0.05) == 0.126
        assert gof.critical_value(critical_values, "A", 0.05) == 0.752
        with pytest.raises(KeyError):
            gof.critical_value(critical_values, "A", 0.07)
        r = gof.decide(gof.compute_statistics(U3), critical_values, 0.05)
        assert r.reject_c is False and r.reject_a is False and r.level == 0.05

    def test_h0_monte_carlo(self, critical_values):
        c_crit = gof.critical_value(critical_values, "C", 0.05)
        a_crit = gof.critical_value(critical_values, "A", 0.05)
        truth = ModelParams.pgev(4.36, 0.285, -0.24, 1)
        gen = np.random.default_rng(135)
        ok = 0
        for _ in range(200):
            data = dist.sample(truth, 135, gen)
            fit = mle.fit_mle(data)
            r = gof.gof_test(data, fit)
            ok += (r.c_modified < c_crit) and (r.a_modified < a_crit)
        assert ok >= 180
