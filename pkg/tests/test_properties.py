"""Property-based checks of the library invariants."""
import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from pgev import asymptotics, bayes, dist, gof, orders, specfun
from pgev.asymptotics import DoaCase
from pgev.dist import Family, ModelParams

SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])

mus = st.floats(-3, 6)
sigmas = st.floats(0.05, 3)
xis = st.floats(-1.5, 1.5).filter(lambda v: abs(v) > 1e-3)
signs = st.sampled_from([1, -1])
probs = st.floats(1e-9, 1 - 1e-9)


@st.composite
def pgev_params(draw, xi=xis):
    return ModelParams.pgev(draw(mus), draw(sigmas), draw(xi), draw(signs))


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

@SETTINGS
@given(st.floats(0.1, 20))
def test_gamma_recurrence(x):
    assert specfun.gamma_fn(x + 1) == pytest.approx(x * specfun.gamma_fn(x), rel=1e-10)


@SETTINGS
@given(st.floats(-6, 6))
def test_normal_quantile_inverts_cdf(x):
    assert specfun.std_normal_quantile(specfun.std_normal_cdf(x)) == pytest.approx(x, abs=1e-8)


@SETTINGS
@given(st.floats(-10, 10))
def test_empty_hypergeom_is_exp(x):
    val = specfun.gen_hypergeom(specfun.HypergeomSpec((), (), x))
    assert val == pytest.approx(math.exp(x), rel=1e-12)


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

@SETTINGS
@given(pgev_params(), probs)
def test_cdf_quantile_round_trip(params, p):
    x = float(dist.quantile(params, p))
    assume(math.isfinite(x) and x != 0)
    assert float(dist.cdf(params, x)) == pytest.approx(p, abs=1e-10, rel=1e-8)


@SETTINGS
@given(pgev_params(), st.floats(1e-6, 1 - 1e-6))
def test_quantile_of_cdf(params, p):
    x = float(dist.quantile(params, p))
    assume(math.isfinite(x) and 1e-250 < abs(x) < 1e250)
    assert float(dist.quantile(params, dist.cdf(params, x))) == pytest.approx(x, rel=1e-8)


@SETTINGS
@given(pgev_params(), st.lists(probs, min_size=2, max_size=20))
def test_cdf_nondecreasing_pdf_nonnegative(params, ps):
    xs = np.sort(np.asarray(dist.quantile(params, np.array(ps)), float))
    xs = xs[np.isfinite(xs)]
    c = np.asarray(dist.cdf(params, xs), float)
    assert np.all(np.diff(c) >= 0)
    assert np.all(np.asarray(dist.pdf(params, xs)) >= 0)


@SETTINGS
@given(pgev_params(), st.floats(-5, 5), st.floats(0.05, 0.95))
def test_log_location_equivariance(params, c, p):
    # scaling x by e^c shifts mu by c on both branches
    shifted = ModelParams.pgev(params.mu + c, params.sigma, params.xi, params.support_sign)
    x = float(dist.quantile(params, p))
    assume(math.isfinite(x) and 1e-200 < abs(x) < 1e200)
    assert float(dist.cdf(shifted, x * math.exp(c))) == pytest.approx(
        float(dist.cdf(params, x)), abs=1e-12)


@SETTINGS
@given(pgev_params(xi=st.floats(-1.5, -0.01)))
def test_entropy_identity(params):
    gev = ModelParams.gev(params.mu, params.sigma, params.xi)
    assert dist.entropy(params) - dist.entropy(gev) == pytest.approx(
        dist.mean_log_abs(params), abs=1e-9)


@SETTINGS
@given(pgev_params(), st.integers(0, 2**32 - 1))
def test_sample_in_support(params, seed):
    ends = np.asarray(dist.quantile(params, np.array([1e-12, 1 - 1e-12])), float)
    assume(np.all(np.isfinite(ends)) and np.all(ends != 0))
    x = dist.sample(params, 50, np.random.default_rng(seed)).values
    s = dist.support(params)
    assert np.all((x >= s.lower) & (x <= s.upper))
    assert np.all(np.sign(x) == params.support_sign)


def test_sample_overflow_is_reported():
    with pytest.raises(OverflowError):
        dist.sample(ModelParams.pgev(0, 1, 1.5, 1), 2000, np.random.default_rng(0))


# ---------------------------------------------------------------------------
# orders
# ---------------------------------------------------------------------------

@SETTINGS
@given(mus, sigmas, st.floats(-1.5, -0.01), signs, st.floats(0.01, 5))
def test_entropy_gap_slope_one_in_mu(mu, sigma, xi, sign, c):
    a = orders.entropy_order_check(mu, sigma, xi, sign)
    b = orders.entropy_order_check(mu + c, sigma, xi, sign)
    assert b.delta_entropy - a.delta_entropy == pytest.approx(c, abs=1e-9)
    assert (b.ordered is orders.Ordered.YES) == (b.e_log_abs_x > orders.BOUNDARY_TOL)


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------

@SETTINGS
@given(st.floats(0.2, 5), st.floats(1.01, 50), st.floats(2, 1e5))
def test_log_tail_ratio_exact(alpha, x, t):
    r = asymptotics.doa_ratio(DoaCase.L1_POS_XI, asymptotics.log_tail_parent(alpha),
                              1 / alpha, x, t)
    assert r.ratio == pytest.approx(r.self_consistent_limit, rel=1e-12)


@SETTINGS
@given(st.sampled_from(["k1", "k2", "k4", "k5"]), st.floats(0.3, 4), st.floats(0.05, 0.95),
       st.integers(2, 10**7))
def test_pmax_stability(kind, alpha, p, n):
    law = ModelParams.pmax(kind, alpha)
    x = float(dist.quantile(law, p))
    parent = asymptotics.stable_law_parent(law)
    tr = asymptotics.pmax_convergence(parent, law, x, [n])
    assert tr.ratio_values[0] == pytest.approx(p, abs=1e-12)


@SETTINGS
@given(st.floats(0.2, 4), st.floats(0.01, 0.95))
def test_von_mises_log_tail(alpha, p):
    parent = asymptotics.log_tail_parent(alpha)
    assume(parent.quantile_logabs(p) < 700)
    x = parent.quantile(p)
    assert asymptotics.von_mises_ratio(1, parent, x) == pytest.approx(alpha, rel=1e-10)


# ---------------------------------------------------------------------------
# bayes
# ---------------------------------------------------------------------------

@SETTINGS
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_acceptance_prob_range(cur, prop):
    a = bayes.acceptance_prob(cur, prop)
    assert 0 <= a <= 1
    assert (a == 1) == (prop >= cur) or math.exp(prop - cur) == 1.0


@SETTINGS
@given(st.lists(st.tuples(st.floats(3, 5), st.floats(-2, -0.5), st.floats(-0.4, 0.2)),
                min_size=1, max_size=6),
       st.lists(st.floats(1, 500), min_size=2, max_size=10))
def test_predictive_cdf_monotone(draws, ys):
    chain = bayes.Chain(np.array(draws), np.zeros((len(draws), 3)), 0, None)
    vals = bayes.predictive_cdf(chain, np.sort(ys))
    assert np.all(np.diff(vals) >= 0) and np.all((vals >= 0) & (vals <= 1))


@SETTINGS
@given(st.tuples(st.floats(3, 5), st.floats(-2, -0.5), st.floats(-0.4, 0.2)),
       st.floats(1.01, 200), st.floats(1.01, 200))
def test_return_level_monotone(theta, m1, m2):
    assume(m1 < m2)
    chain = bayes.Chain(np.array([theta, theta]), np.zeros((2, 3)), 0, None)
    assert bayes.return_level(chain, m1) <= bayes.return_level(chain, m2)


# ---------------------------------------------------------------------------
# gof
# ---------------------------------------------------------------------------

@SETTINGS
@given(st.lists(st.integers(1, 2**20 - 1), min_size=1, max_size=60, unique=True))
def test_gof_symmetry_and_bounds(ks):
    u = np.sort(ks) / 2**20  # dyadic, so 1 - u is exact
    r = gof.compute_statistics(u)
    s = gof.compute_statistics((1 - u)[::-1])
    n = u.size
    assert r.w2 == pytest.approx(s.w2, abs=1e-12)
    assert r.a2 == pytest.approx(s.a2, abs=1e-12)
    assert r.w2 >= 1 / (12 * n) * (1 - 1e-12)
    assert r.c_modified == r.w2 * (1 + 0.5 / n)
    assert r.a_modified == r.a2 * (1 + 0.75 / n + 2.25 / n ** 2)


@SETTINGS
@given(st.lists(st.floats(0.01, 100), min_size=3, max_size=40, unique=True))
def test_uniformize_strictly_increasing(xs):
    assume(np.min(np.diff(np.sort(xs))) > 1e-6)  # cdf must separate the points in doubles
    u = gof.uniformize(xs, lambda v: 1 - np.exp(-np.asarray(v) / 10))
    assert np.all(np.diff(u) > 0) and np.all((u > 0) & (u < 1))
