"""Independent reference computations used by several test modules."""
import math

import numpy as np
from scipy import integrate, stats

from pgev import dist
from pgev.dist import ModelParams


def log_scale_law(params: ModelParams):
    """(scipy GEV law, orientation) of V with |X| = exp(orientation * V).

    Positive branch: log X ~ GEV(mu, sigma, xi). Negative branch:
    -log|X| ~ GEV(-mu, sigma, xi). scipy's shape c is -xi.
    """
    s = params.support_sign
    loc = params.mu if s > 0 else -params.mu
    return stats.genextreme(-params.xi, loc=loc, scale=params.sigma), s


def abs_moment_scipy(params: ModelParams, k: int) -> float:
    law, s = log_scale_law(params)
    return float(law.expect(lambda v: np.exp(s * k * v), epsabs=0, epsrel=1e-12, limit=400))


def _w_integral(params, fn):
    """Integral over w = log|x| of fn(w), cut where the mass beyond is < 1e-14."""
    law, orient = log_scale_law(params)
    lo, hi = law.support()
    probs = [1e-14, 1e-8, 1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1 - 1e-4, 1 - 1e-8,
             1 - 1e-14]
    cuts = law.ppf(probs)
    v_lo = lo if np.isfinite(lo) else cuts[0]
    v_hi = hi if np.isfinite(hi) else cuts[-1]
    edges = np.unique(np.concatenate([[v_lo], cuts[(cuts > v_lo) & (cuts < v_hi)], [v_hi]]))
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        wa, wb = sorted([orient * a, orient * b])
        val, _ = integrate.quad(fn, wa, wb, limit=200, epsabs=0, epsrel=1e-12)
        total += val
    return total


W_MAX = 700.0  # |log|x|| beyond which x leaves double range


def abs_moment_pdf(params: ModelParams, k: int) -> float:
    """Quadrature of |x|^k pdf(x) in w = log|x| using the library density."""
    s = params.support_sign
    return _w_integral(params, lambda w: 0.0 if abs(w) > W_MAX else math.exp(
        (k + 1) * w + dist.logpdf(params, s * math.exp(w))))


def entropy_pdf(params: ModelParams) -> float:
    s = params.support_sign

    def fn(w):
        if abs(w) > W_MAX:
            return 0.0
        lp = dist.logpdf(params, s * math.exp(w))
        return 0.0 if not math.isfinite(lp) else -math.exp(lp + w) * lp

    return _w_integral(params, fn)


def total_mass(params: ModelParams) -> float:
    s = params.support_sign
    return _w_integral(params, lambda w: 0.0 if abs(w) > W_MAX else math.exp(
        w + dist.logpdf(params, s * math.exp(w))))
