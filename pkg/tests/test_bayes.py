import math

import numpy as np
import pytest

from pgev import bayes, dist, mle
from pgev.bayes import Chain, PriorSpec, ProposalSpec
from pgev.dist import Family, ModelParams

TRUTH = ModelParams.pgev(4.3614, 0.2853, -0.2386, 1)
FLAT = PriorSpec(1e8, 1e8, 1e8)


@pytest.fixture(scope="module")
def data135():
    return dist.sample(TRUTH, 135, np.random.default_rng(135))


@pytest.fixture(scope="module")
def chain(data135):
    return bayes.run_mcmc(data135, n_iter=1500, seed=11)


def constant_chain(params: ModelParams, n=1):
    theta = [params.mu, math.log(params.sigma), params.xi]
    fam = params.family
    return Chain(np.tile(theta, (n, 1)), np.zeros((n, 3)), 0, None, fam,
                 params.support_sign if fam is Family.PGEV else None)


class TestSpecs:
    def test_positive(self):
        with pytest.raises(ValueError):
            PriorSpec(1, 0, 1)
        with pytest.raises(ValueError):
            ProposalSpec(1, 1, -1)
        assert ProposalSpec.from_sds([0.1, 0.2, 0.3]).variances == pytest.approx((0.01, 0.04, 0.09))

    def test_chain_invariants(self):
        with pytest.raises(ValueError):
            Chain(np.zeros((5, 3)), np.zeros((5, 3)), 5, None)
        with pytest.raises(ValueError):
            Chain(np.zeros((5, 2)), np.zeros((5, 2)), 0, None)


class TestLogPosterior:
    def test_flat_prior_differences(self, data135):
        a, b = (4.3, math.log(0.3), -0.2), (4.4, math.log(0.25), -0.3)
        dlp = bayes.log_posterior(a, data135, FLAT) - bayes.log_posterior(b, data135, FLAT)
        dll = (mle.loglik(ModelParams.pgev(a[0], math.exp(a[1]), a[2], 1), data135)
               - mle.loglik(ModelParams.pgev(b[0], math.exp(b[1]), b[2], 1), data135))
        assert dlp == pytest.approx(dll, abs=1e-4)

    def test_definition(self, data135):
        th = (4.3, math.log(0.3), -0.2)
        prior = PriorSpec(2.0, 3.0, 0.5)
        lp = sum(-0.5 * t * t / v - 0.5 * math.log(2 * math.pi * v)
                 for t, v in zip(th, prior.variances))
        ll = mle.loglik(ModelParams.pgev(th[0], math.exp(th[1]), th[2], 1), data135)
        assert bayes.log_posterior(th, data135, prior) == pytest.approx(ll + lp, rel=1e-12)

    def test_out_of_support(self, data135):
        # upper endpoint exp(mu - sigma/xi) below the data
        assert bayes.log_posterior((0.0, 0.0, -1.0), data135) == -math.inf

    def test_prior_only_peaks_at_zero(self):
        prior = PriorSpec(1.0, 2.0, 3.0)
        at0 = bayes.log_posterior((0, 0, 0), [], prior)
        assert at0 == bayes.log_posterior((0, 0, 0), None, prior)
        g = np.random.default_rng(0)
        for th in g.normal(scale=0.5, size=(50, 3)):
            assert bayes.log_posterior(th, [], prior) < at0


class TestAcceptance:
    def test_examples(self):
        assert bayes.acceptance_prob(-3.0, -2.0) == 1.0
        assert bayes.acceptance_prob(-3.0, -3.0) == 1.0
        assert bayes.acceptance_prob(0.0, -1.0) == pytest.approx(0.3678794, abs=1e-7)
        assert bayes.acceptance_prob(-5.0, -math.inf) == 0.0
        assert bayes.acceptance_prob(-math.inf, -5.0) == 1.0
        with pytest.raises(ValueError):
            bayes.acceptance_prob(-math.inf, -math.inf)


class TestSampler:
    def test_detailed_balance_three_states(self):
        target = np.array([0.2, 0.5, 0.3])
        logt = np.log(target)

        def log_target(th):
            return float(logt[int(th[0])])

        def propose(c, value, gen):
            # symmetric: step to either neighbour on the 3-cycle
            return float((value + (1 if gen.random() < 0.5 else -1)) % 3)

        draws = bayes.metropolis_within_gibbs(log_target, [0.0], propose, 10**6,
                                              np.random.default_rng(42))
        freq = np.bincount(draws[:, 0].astype(int), minlength=3) / draws.shape[0]
        np.testing.assert_allclose(freq, target, rtol=0.02)

    def test_kernel_matches_reference_sweep(self, data135):
        init = (4.35, math.log(0.28), -0.22)
        prior = PriorSpec(10.0, 10.0, 10.0)
        prop = ProposalSpec.from_sds([0.03, 0.08, 0.06])
        chain = bayes.run_mcmc(data135, prior, prop, n_iter=300, init=init, seed=9)
        normals, uniforms = bayes._draw_stream(9, 300)
        theta = list(init)
        cur = bayes.log_posterior(theta, data135, prior)
        for i in range(300):
            for c in range(3):  # mu, then eta, then xi, using the freshest values
                cand = list(theta)
                cand[c] = theta[c] + prop.sds[c] * normals[i, c]
                lp = bayes.log_posterior(cand, data135, prior)
                ok = math.log(uniforms[i, c]) < lp - cur
                assert chain.accepted[i, c] == ok
                if ok:
                    theta, cur = cand, lp
            np.testing.assert_allclose(chain.draws[i], theta, rtol=1e-12, atol=0)

    def test_seed_determinism(self, data135):
        a = bayes.run_mcmc(data135, n_iter=400, seed=5)
        b = bayes.run_mcmc(data135, n_iter=400, seed=5)
        c = bayes.run_mcmc(data135, n_iter=400, seed=6)
        assert np.array_equal(a.draws, b.draws) and np.array_equal(a.accepted, b.accepted)
        assert a.proposal == b.proposal
        assert not np.array_equal(a.draws, c.draws)

    def test_tiny_proposal(self, data135):
        prop = ProposalSpec(1e-20, 1e-20, 1e-20)
        chain = bayes.run_mcmc(data135, proposal=prop, n_iter=200, seed=1)
        assert np.all(chain.acceptance_rates == 1.0)
        assert np.ptp(chain.draws, axis=0).max() < 1e-8

    def test_pilot_tuning_band(self, data135):
        chain = bayes.run_mcmc(data135, n_iter=2000, seed=3)
        lo, hi = bayes.TARGET_ACCEPTANCE
        assert chain.tuning
        final = np.array(chain.tuning[-1][1])
        assert np.all((final >= lo) & (final <= hi))
        assert np.all((chain.acceptance_rates > 0.1) & (chain.acceptance_rates < 0.6))

    def test_defaults(self, data135):
        chain = bayes.run_mcmc(data135, n_iter=100, seed=2)
        assert chain.burn_in == 50 and chain.seed == 2
        fit = mle.fit_mle(data135)
        # first proposal starts at the MLE
        assert chain.family is Family.PGEV and chain.support_sign == 1
        assert np.all(np.abs(chain.draws[0] - [fit.params.mu, math.log(fit.params.sigma),
                                               fit.params.xi]) < 0.2)

    def test_bad_init(self, data135):
        with pytest.raises(ValueError):
            bayes.run_mcmc(data135, n_iter=10, init=(0.0, 0.0, -1.0), seed=0)
        with pytest.raises(ValueError):
            bayes.run_mcmc(data135, n_iter=0, seed=0)
        with pytest.raises(ValueError):
            bayes.run_mcmc(data135, n_iter=10, seed=0, family=Family.GUMBEL)

    def test_flat_prior_near_mle(self):
        data = dist.sample(TRUTH, 500, np.random.default_rng(500))
        chain = bayes.run_mcmc(data, FLAT, n_iter=5000, seed=17, burn_in=1000)
        fit = mle.fit_mle(data)
        r = chain.retained
        est = {"mu": r[:, 0], "eta": r[:, 1], "xi": r[:, 2]}
        mle_pt = {"mu": fit.params.mu, "eta": math.log(fit.params.sigma), "xi": fit.params.xi}
        for k in est:
            assert abs(est[k].mean() - mle_pt[k]) < 2 * est[k].std(ddof=1)

    def test_gev_family(self):
        data = dist.sample(ModelParams.gev(80, 20, -0.1), 200, np.random.default_rng(8))
        chain = bayes.run_mcmc(data, n_iter=1500, seed=4, family=Family.GEV)
        assert chain.support_sign is None
        assert abs(chain.retained[:, 0].mean() - 80) < 6


class TestPredictive:
    @pytest.mark.parametrize("params", [TRUTH, ModelParams.pgev(0.5, 0.4, -0.2, -1),
                                        ModelParams.gev(80, 20, -0.1)])
    def test_length_one_chain(self, params):
        chain = constant_chain(params)
        lo, hi = dist.quantile(params, 1e-6), dist.quantile(params, 1 - 1e-6)
        for y in np.linspace(lo, hi, 25):
            assert abs(bayes.predictive_cdf(chain, y) - float(dist.cdf(params, y))) <= 1e-15
        for m in (2, 4, 10, 50, 1000):
            assert bayes.return_level(chain, m) == pytest.approx(
                float(dist.quantile(params, 1 - 1 / m)), rel=1e-12)

    def test_identical_draws(self):
        chain = constant_chain(TRUTH, 20)
        assert bayes.return_level(chain, 4) == pytest.approx(
            float(dist.quantile(TRUTH, 0.75)), rel=1e-12)
        assert bayes.predictive_cdf(chain, 80.0) == pytest.approx(float(dist.cdf(TRUTH, 80.0)),
                                                                  abs=1e-15)

    def test_bounds_and_monotone(self, chain):
        ys = np.linspace(1, 400, 200)
        vals = bayes.predictive_cdf(chain, ys)
        assert np.all(np.diff(vals) >= 0)
        assert np.all((vals >= 0) & (vals <= 1))
        assert bayes.predictive_cdf(chain, -5.0) == 0.0
        assert bayes.predictive_cdf(chain, 1e-12) == 0.0

    def test_return_level_solves_and_increases(self, chain):
        levels = bayes.return_levels(chain, [4, 10, 15, 20, 30, 35, 50])
        vals = list(levels.values())
        assert all(a < b for a, b in zip(vals, vals[1:]))
        for m, x in levels.items():
            assert bayes.predictive_cdf(chain, x) == pytest.approx(1 - 1 / m, abs=1e-9)
        with pytest.raises(ValueError):
            bayes.return_level(chain, 1.0)

    def test_bracket_failure(self):
        chain = constant_chain(TRUTH, 3)
        chain.draws[1, 0] = math.inf
        with pytest.raises(bayes.BracketError):
            bayes.return_level(chain, 10)


class TestSummaryAndCsv:
    def test_constant_chain(self):
        s = bayes.chain_summary(constant_chain(TRUTH, 10))
        assert s["sigma"]["mean"] == pytest.approx(TRUTH.sigma, rel=1e-15)
        assert all(s[k]["sd"] == 0 for k in ("mu", "sigma", "xi"))

    def test_recompute(self, data135):
        chain = bayes.run_mcmc(data135, n_iter=600, seed=12, burn_in=100)
        s = bayes.chain_summary(chain)
        r = chain.draws[100:]
        assert s["mu"]["mean"] == float(np.mean(r[:, 0]))
        assert s["sigma"]["sd"] == float(np.std(np.exp(r[:, 1]), ddof=1))
        assert s["xi"]["acceptance_rate"] == chain.accepted[:, 2].sum() / 600
        assert s == bayes.chain_summary(chain)

    def test_csv_round_trip(self, tmp_path, data135):
        chain = bayes.run_mcmc(data135, n_iter=120, seed=13)
        path = tmp_path / "chain.csv"
        bayes.write_chain_csv(chain, path)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(bayes.CSV_COLUMNS)
        back = bayes.read_chain_csv(path, burn_in=chain.burn_in)
        assert np.array_equal(back.draws, chain.draws)
        assert np.array_equal(back.accepted, chain.accepted)

    def test_csv_errors(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("iter,mu,eta\n0,1,2\n")
        with pytest.raises(ValueError, match="missing"):
            bayes.read_chain_csv(p)
        p.write_text(",".join(bayes.CSV_COLUMNS) + "\n")
        with pytest.raises(ValueError, match="empty"):
            bayes.read_chain_csv(p)
