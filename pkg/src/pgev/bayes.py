"""Metropolis-within-Gibbs sampling of (mu, eta = log sigma, xi).

Priors are independent zero-mean normals; proposals are coordinate-wise
Gaussian random walks, updated in the order mu, eta, xi. The chain body
lives in the compiled kernel (or its numpy fallback); tuning, predictive
distribution and return levels are here.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import optimize

from . import specfun
from ._backend import kernels
from .dataset import Dataset
from .dist import Family, ModelParams, gev_cdf, pgev_cdf, quantile

PARAM_NAMES = ("mu", "eta", "xi")
CSV_COLUMNS = ("iter", "mu", "eta", "xi", "accepted_mu", "accepted_eta", "accepted_xi")
DEFAULT_PRIOR_VAR = 1e4
TARGET_ACCEPTANCE = (0.2, 0.5)
SAMPLED = (Family.PGEV, Family.GEV)


class BracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class PriorSpec:
    v_mu: float = DEFAULT_PRIOR_VAR
    v_eta: float = DEFAULT_PRIOR_VAR
    v_xi: float = DEFAULT_PRIOR_VAR

    def __post_init__(self):
        if not all(v > 0 for v in self.variances):
            raise ValueError("prior variances must be positive")

    @property
    def variances(self) -> tuple:
        return (self.v_mu, self.v_eta, self.v_xi)


@dataclass(frozen=True)
class ProposalSpec:
    """Random-walk step variances."""
    w_mu: float
    w_eta: float
    w_xi: float

    def __post_init__(self):
        if not all(w > 0 for w in self.variances):
            raise ValueError("proposal variances must be positive")

    @classmethod
    def from_sds(cls, sds) -> "ProposalSpec":
        return cls(*(float(s) ** 2 for s in sds))

    @property
    def variances(self) -> tuple:
        return (self.w_mu, self.w_eta, self.w_xi)

    @property
    def sds(self) -> tuple:
        return tuple(math.sqrt(w) for w in self.variances)


@dataclass
class Chain:
    draws: np.ndarray           # (n, 3) over (mu, eta, xi)
    accepted: np.ndarray        # (n, 3) int8 acceptance flags
    burn_in: int
    seed: Optional[int]
    family: Family = Family.PGEV
    support_sign: Optional[int] = 1
    proposal: Optional[ProposalSpec] = None
    tuning: list = field(default_factory=list)

    def __post_init__(self):
        self.draws = np.asarray(self.draws, float)
        self.accepted = np.asarray(self.accepted, np.int8)
        if self.draws.ndim != 2 or self.draws.shape[1] != 3:
            raise ValueError("draws must be an (n, 3) array")
        if self.accepted.shape != self.draws.shape:
            raise ValueError("acceptance flags must match draws")
        if not 0 <= self.burn_in < self.n:
            raise ValueError(f"burn_in must lie in [0, {self.n})")

    @property
    def n(self) -> int:
        return self.draws.shape[0]

    @property
    def acceptance_counts(self) -> np.ndarray:
        return self.accepted.sum(axis=0).astype(int)

    @property
    def acceptance_rates(self) -> np.ndarray:
        return self.acceptance_counts / self.n

    @property
    def retained(self) -> np.ndarray:
        return self.draws[self.burn_in:]

    def params_at(self, i: int) -> ModelParams:
        mu, eta, xi = self.draws[i]
        if self.family is Family.GEV:
            return ModelParams.gev(mu, math.exp(eta), xi)
        return ModelParams.pgev(mu, math.exp(eta), xi, self.support_sign)


# ---------------------------------------------------------------------------
# target
# ---------------------------------------------------------------------------

def _prepare(data, family: Family):
    """Kernel-ready data vector and sign (log|x| for PGEV)."""
    if data is None:
        return None, 1
    values = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    if values.size == 0:
        return None, 1
    if family is Family.PGEV:
        sgn = Dataset(values).common_sign()
        return np.log(np.abs(values)), sgn
    return values, 1


def _log_prior(theta, prior: PriorSpec) -> float:
    return -0.5 * sum(t * t / v + math.log(2 * math.pi * v)
                      for t, v in zip(theta, prior.variances))


def log_posterior(theta, data, prior: PriorSpec = PriorSpec(),
                  family=Family.PGEV) -> float:
    """Unnormalized log posterior at (mu, eta, xi); -inf off support.

    Empty or missing data gives the log prior.
    """
    family = Family(family)
    mu, eta, xi = (float(v) for v in theta)
    lp = _log_prior((mu, eta, xi), prior)
    vec, sgn = _prepare(data, family)
    if vec is None:
        return lp
    sigma = math.exp(eta)
    if family is Family.PGEV:
        ll = kernels.pgev_loglik(vec, sgn, mu, sigma, xi)
    elif family is Family.GEV:
        ll = kernels.gev_loglik(vec, mu, sigma, xi)
    else:
        raise ValueError(f"no sampler for family {family.value}")
    return ll + lp


def acceptance_prob(current: float, proposed: float) -> float:
    """min(1, exp(proposed - current)) for a symmetric proposal."""
    if current == -math.inf and proposed == -math.inf:
        raise ValueError("both log posteriors are -inf; chain is out of support")
    if proposed >= current:
        return 1.0
    return math.exp(proposed - current)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _draw_stream(seed, n_iter: int):
    gen = specfun.rng_new(seed)
    normals = gen.standard_normal((n_iter, 3))
    uniforms = specfun.rng_uniform(gen, (n_iter, 3))
    return normals, uniforms


def _family_code(family: Family) -> int:
    return kernels.FAMILY_PGEV if family is Family.PGEV else kernels.FAMILY_GEV


def _run(vec, family, sgn, init, prior, sds, seed, n_iter, backend=None):
    k = kernels if backend is None else backend
    normals, uniforms = _draw_stream(seed, n_iter)
    draws, acc = k.mwg_chain(vec, _family_code(family), sgn, list(init),
                             list(prior.variances), list(sds), normals, uniforms)
    return np.asarray(draws), np.asarray(acc, np.int8)


def pilot_tune(data, prior: PriorSpec, init, seed, family=Family.PGEV,
               start_sds=(0.05, 0.05, 0.05), pilot_iter: int = 250,
               max_rounds: int = 30) -> tuple:
    """Scale per-coordinate step sds until each acceptance rate is in [0.2, 0.5].

    Returns (ProposalSpec, history) where history rows are (sds, rates).
    The pilot stream is seeded independently of the main chain.
    """
    family = Family(family)
    vec, sgn = _prepare(data, family)
    sds = np.array(start_sds, float)
    theta = np.array(init, float)
    lo, hi = TARGET_ACCEPTANCE
    pilot_seeds = np.random.SeedSequence(seed).spawn(max_rounds)
    history = []
    for r in range(max_rounds):
        pseed = int(pilot_seeds[r].generate_state(1, np.uint64)[0])
        draws, acc = _run(vec, family, sgn, theta, prior, sds, pseed, pilot_iter)
        rates = acc.mean(axis=0)
        history.append((sds.tolist(), rates.tolist()))
        theta = draws[-1]
        if np.all((rates >= lo) & (rates <= hi)):
            break
        # multiplicative step toward the target band, damped at the extremes
        factor = np.where(rates < lo, np.maximum(0.25, rates / 0.35 + 0.1),
                          np.where(rates > hi, np.minimum(4.0, rates / 0.35 + 0.5), 1.0))
        sds = sds * factor
    return ProposalSpec.from_sds(sds), history


def run_mcmc(data, prior: Optional[PriorSpec] = None, proposal: Optional[ProposalSpec] = None,
             n_iter: int = 5000, init=None, seed: int = 0, burn_in: Optional[int] = None,
             family=Family.PGEV, backend=None) -> Chain:
    """Metropolis-within-Gibbs chain of length ``n_iter``.

    ``init`` defaults to the maximum likelihood point in (mu, log sigma, xi);
    ``proposal`` defaults to pilot-tuned sds; ``burn_in`` defaults to n/2.
    """
    family = Family(family)
    if family not in SAMPLED:
        raise ValueError(f"no sampler for family {family.value}")
    if n_iter < 1:
        raise ValueError("n_iter must be at least 1")
    prior = prior or PriorSpec()
    data = data if isinstance(data, Dataset) else Dataset(data)
    vec, sgn = _prepare(data, family)
    start_sds = (0.05, 0.05, 0.05)
    if init is None:
        from .mle import fit_mle

        fit = fit_mle(data, family)
        init = (fit.params.mu, math.log(fit.params.sigma), fit.params.xi)
        se = fit.std_errors
        if np.all(np.isfinite(se)) and np.all(se > 0):
            start_sds = (se[0], se[1] / fit.params.sigma, se[2])
    init = tuple(float(v) for v in init)
    if not math.isfinite(log_posterior(init, data, prior, family)):
        raise ValueError(f"initial point {init} has zero posterior density")
    history = []
    if proposal is None:
        proposal, history = pilot_tune(data, prior, init, seed, family, start_sds)
    draws, acc = _run(vec, family, sgn, init, prior, proposal.sds, seed, n_iter, backend)
    burn = n_iter // 2 if burn_in is None else int(burn_in)
    return Chain(draws, acc, burn, seed, family, sgn if family is Family.PGEV else None,
                 proposal, history)


def metropolis_within_gibbs(log_target: Callable[[np.ndarray], float], init,
                            propose: Callable, n_iter: int, gen: np.random.Generator):
    """Generic coordinate-wise Metropolis sampler with a symmetric proposal.

    ``propose(c, value, gen)`` returns a candidate for coordinate ``c``.
    Returns the (n_iter, d) matrix of states after each sweep.
    """
    theta = np.array(init, dtype=float)
    d = theta.size
    out = np.empty((n_iter, d))
    cur = log_target(theta)
    if not math.isfinite(cur):
        raise ValueError("initial point has zero target density")
    logu = np.log(specfun.rng_uniform(gen, (n_iter, d)))
    for i in range(n_iter):
        for c in range(d):
            old = theta[c]
            theta[c] = propose(c, old, gen)
            prop = log_target(theta)
            if prop > -math.inf and logu[i, c] < prop - cur:
                cur = prop
            else:
                theta[c] = old
        out[i] = theta
    return out


# ---------------------------------------------------------------------------
# posterior summaries, predictive distribution, return levels
# ---------------------------------------------------------------------------

def _retained_params(chain: Chain):
    r = chain.retained
    if r.shape[0] == 0:
        raise ValueError("no draws after burn-in")
    return r[:, 0], np.exp(r[:, 1]), r[:, 2]


def predictive_cdf(chain: Chain, y):
    """Average of the one-period cdf over retained draws."""
    mu, sigma, xi = _retained_params(chain)
    y = np.asarray(y, float)
    yy = y[..., None]
    if chain.family is Family.PGEV:
        vals = pgev_cdf(yy, mu, sigma, xi, chain.support_sign)
    else:
        vals = gev_cdf(yy, mu, sigma, xi)
    out = np.mean(vals, axis=-1)
    return float(out) if out.ndim == 0 else out


def return_level(chain: Chain, m: float, rtol: float = 1e-8) -> float:
    """Level x with predictive_cdf(x) = 1 - 1/m."""
    if not m > 1:
        raise ValueError("return period must exceed 1")
    p = 1.0 - 1.0 / m
    mu, sigma, xi = _retained_params(chain)
    if chain.family is Family.PGEV:
        from .dist import pgev_quantile

        q = pgev_quantile(p, mu, sigma, xi, chain.support_sign)
    else:
        from .dist import gev_quantile

        q = gev_quantile(p, mu, sigma, xi)
    lo, hi = float(np.min(q)), float(np.max(q))
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise BracketError("per-draw quantiles are not finite")
    if hi - lo <= rtol * max(abs(lo), abs(hi)):
        return lo

    def f(x):
        return predictive_cdf(chain, x) - p

    flo, fhi = f(lo), f(hi)
    if flo > 0 or fhi < 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    return float(optimize.brentq(f, lo, hi, rtol=rtol, xtol=1e-14 * max(abs(lo), abs(hi)),
                                 maxiter=500))


def return_levels(chain: Chain, periods: Sequence[float]) -> dict:
    return {float(m): return_level(chain, m) for m in periods}


def chain_summary(chain: Chain) -> dict:
    """Per-parameter mean, sd and acceptance rate, with sigma = exp(eta)."""
    r = chain.retained
    cols = {"mu": r[:, 0], "sigma": np.exp(r[:, 1]), "xi": r[:, 2]}
    rates = chain.acceptance_rates
    out = {}
    for j, (name, col) in enumerate(cols.items()):
        # exact 0 for a constant column; np.std leaves rounding residue there
        sd = float(np.std(col, ddof=1)) if col.size > 1 and np.ptp(col) > 0 else 0.0
        out[name] = {"mean": float(np.mean(col)), "sd": sd,
                     "acceptance_rate": float(rates[j])}
    return out


def write_chain_csv(chain: Chain, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i in range(chain.n):
            w.writerow([i] + [repr(float(v)) for v in chain.draws[i]]
                       + [int(a) for a in chain.accepted[i]])


def read_chain_csv(path, burn_in: int = 0, seed: Optional[int] = None,
                   family=Family.PGEV, support_sign: Optional[int] = 1) -> Chain:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: empty chain file")
    missing = set(CSV_COLUMNS) - set(rows[0])
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    draws = np.array([[float(r[c]) for c in PARAM_NAMES] for r in rows])
    acc = np.array([[int(r["accepted_" + c]) for c in PARAM_NAMES] for r in rows], np.int8)
    family = Family(family)
    return Chain(draws, acc, burn_in, seed, family,
                 support_sign if family is Family.PGEV else None)
