"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``.

Signatures and results match the extension module; this one is imported
when the extension is not built or ``PGEV_PURE_PYTHON`` is set.
"""
import math

import numpy as np

XI_ZERO = 1e-8
FAMILY_PGEV = 0
FAMILY_GEV = 1


def pgev_loglik(logabs, sign, mu, sigma, xi):
    logabs = np.asarray(logabs, dtype=float)
    n = logabs.size
    z = sign * (logabs - mu) / sigma
    head = -n * math.log(sigma) - logabs.sum()
    if abs(xi) < XI_ZERO:
        return float(head - z.sum() - np.exp(-z).sum())
    s = xi * z
    if s.min() <= -1.0:
        return -math.inf
    ls = np.log1p(s)
    return float(head - (1.0 + 1.0 / xi) * ls.sum() - np.exp(-ls / xi).sum())


def gev_loglik(x, mu, sigma, xi):
    x = np.asarray(x, dtype=float)
    n = x.size
    z = (x - mu) / sigma
    head = -n * math.log(sigma)
    if abs(xi) < XI_ZERO:
        return float(head - z.sum() - np.exp(-z).sum())
    s = xi * z
    if s.min() <= -1.0:
        return -math.inf
    ls = np.log1p(s)
    return float(head - (1.0 + 1.0 / xi) * ls.sum() - np.exp(-ls / xi).sum())


def _loglik(data, family, sign, mu, eta, xi):
    sigma = math.exp(eta)
    if family == FAMILY_PGEV:
        return pgev_loglik(data, sign, mu, sigma, xi)
    return gev_loglik(data, mu, sigma, xi)


def _log_prior(theta, prior_var):
    return -0.5 * sum(t * t / v + math.log(2 * math.pi * v)
                      for t, v in zip(theta, prior_var))


def mwg_chain(data, family, sign, init, prior_var, proposal_sd, normals, uniforms):
    """Metropolis-within-Gibbs over (mu, eta, xi), one coordinate at a time.

    ``normals`` and ``uniforms`` are (n_iter, 3) arrays of standard normal
    and open-unit uniform draws; row i drives iteration i.
    """
    data = np.asarray(data, dtype=float)
    n_iter = normals.shape[0]
    draws = np.empty((n_iter, 3))
    accepted = np.zeros((n_iter, 3), dtype=np.int8)
    theta = [float(v) for v in init]
    prior_var = [float(v) for v in prior_var]
    sd = [float(v) for v in proposal_sd]
    cur_ll = _loglik(data, family, sign, *theta)
    cur = cur_ll + _log_prior(theta, prior_var)
    if not math.isfinite(cur):
        raise ValueError("initial point has zero posterior density")
    for i in range(n_iter):
        for c in range(3):
            old = theta[c]
            theta[c] = old + sd[c] * normals[i, c]
            ll = _loglik(data, family, sign, *theta)
            prop = ll + _log_prior(theta, prior_var)
            if prop > -math.inf and math.log(uniforms[i, c]) < prop - cur:
                cur = prop
                accepted[i, c] = 1
            else:
                theta[c] = old
        draws[i, 0] = theta[0]
        draws[i, 1] = theta[1]
        draws[i, 2] = theta[2]
    return draws, accepted
