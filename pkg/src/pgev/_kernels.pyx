# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled log-likelihood and Metropolis-within-Gibbs kernels.

Mirrors ``_kernels_py``; see that module for the argument conventions.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, log1p, exp, fabs, INFINITY, M_PI

cnp.import_array()

DEF XI_ZERO = 1e-8
FAMILY_PGEV = 0
FAMILY_GEV = 1


cdef double _pgev_ll(const double[::1] w, int sign, double mu, double sigma,
                     double xi) nogil:
    cdef Py_ssize_t i, n = w.shape[0]
    cdef double z, s, ls, acc = 0.0, inv = 0.0
    cdef bint gumbel = fabs(xi) < XI_ZERO
    if not gumbel:
        inv = 1.0 / xi
    for i in range(n):
        z = sign * (w[i] - mu) / sigma
        acc -= w[i]
        if gumbel:
            acc -= z + exp(-z)
        else:
            s = xi * z
            if s <= -1.0:
                return -INFINITY
            ls = log1p(s)
            acc -= (1.0 + inv) * ls + exp(-ls * inv)
    return acc - n * log(sigma)


cdef double _gev_ll(const double[::1] x, double mu, double sigma, double xi) nogil:
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double z, s, ls, acc = 0.0, inv = 0.0
    cdef bint gumbel = fabs(xi) < XI_ZERO
    if not gumbel:
        inv = 1.0 / xi
    for i in range(n):
        z = (x[i] - mu) / sigma
        if gumbel:
            acc -= z + exp(-z)
        else:
            s = xi * z
            if s <= -1.0:
                return -INFINITY
            ls = log1p(s)
            acc -= (1.0 + inv) * ls + exp(-ls * inv)
    return acc - n * log(sigma)


def pgev_loglik(logabs, int sign, double mu, double sigma, double xi):
    cdef const double[::1] w = np.ascontiguousarray(logabs, dtype=np.float64)
    return _pgev_ll(w, sign, mu, sigma, xi)


def gev_loglik(x, double mu, double sigma, double xi):
    cdef const double[::1] v = np.ascontiguousarray(x, dtype=np.float64)
    return _gev_ll(v, mu, sigma, xi)


cdef inline double _post(const double[::1] data, int family, int sign,
                         double* theta, double* prior_var) nogil:
    cdef double ll, lp = 0.0
    cdef int c
    if family == 0:
        ll = _pgev_ll(data, sign, theta[0], exp(theta[1]), theta[2])
    else:
        ll = _gev_ll(data, theta[0], exp(theta[1]), theta[2])
    if ll == -INFINITY:
        return -INFINITY
    for c in range(3):
        lp -= 0.5 * (theta[c] * theta[c] / prior_var[c] + log(2.0 * M_PI * prior_var[c]))
    return ll + lp


def mwg_chain(data, int family, int sign, init, prior_var, proposal_sd,
              normals, uniforms):
    cdef const double[::1] d = np.ascontiguousarray(data, dtype=np.float64)
    cdef const double[:, ::1] nz = np.ascontiguousarray(normals, dtype=np.float64)
    cdef const double[:, ::1] uz = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t n_iter = nz.shape[0], i
    cdef int c
    out = np.empty((n_iter, 3), dtype=np.float64)
    acc = np.zeros((n_iter, 3), dtype=np.int8)
    cdef double[:, ::1] draws = out
    cdef cnp.int8_t[:, ::1] accepted = acc
    cdef double theta[3]
    cdef double pv[3]
    cdef double sd[3]
    cdef double cur, prop, old
    for c in range(3):
        theta[c] = float(init[c])
        pv[c] = float(prior_var[c])
        sd[c] = float(proposal_sd[c])
    cur = _post(d, family, sign, theta, pv)
    if cur == -INFINITY or cur != cur:
        raise ValueError("initial point has zero posterior density")
    with nogil:
        for i in range(n_iter):
            for c in range(3):
                old = theta[c]
                theta[c] = old + sd[c] * nz[i, c]
                prop = _post(d, family, sign, theta, pv)
                if prop > -INFINITY and log(uz[i, c]) < prop - cur:
                    cur = prop
                    accepted[i, c] = 1
                else:
                    theta[c] = old
            draws[i, 0] = theta[0]
            draws[i, 1] = theta[1]
            draws[i, 2] = theta[2]
    return out, acc
