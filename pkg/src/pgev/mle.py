"""Maximum-likelihood fitting, observed information and quantile intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from . import specfun
from ._backend import kernels
from .dataset import Dataset
from .dist import XI_ZERO, Family, ModelParams, quantile

SHAPE_LOW_WARNING = "xi <= -0.5: nonstandard asymptotics"
SHAPE_HIGH_WARNING = "xi >= 1: MLE may be nonregular"
FITTABLE = (Family.PGEV, Family.GEV, Family.GUMBEL)


class BoundaryError(ValueError):
    """Log-likelihood is not finite on the whole finite-difference stencil."""


class SingularInformation(np.linalg.LinAlgError):
    def __init__(self, msg, condition=math.inf):
        super().__init__(msg)
        self.condition = condition


@dataclass
class FitResult:
    params: ModelParams
    loglik: float
    info_matrix: np.ndarray
    std_errors: np.ndarray
    converged: bool
    iterations: int
    n: int
    warnings: list = field(default_factory=list)

    @property
    def covariance(self) -> np.ndarray:
        return _invert_information(self.info_matrix)

    def theta(self) -> np.ndarray:
        return param_vector(self.params)


def _as_dataset(data) -> Dataset:
    return data if isinstance(data, Dataset) else Dataset(data)


def param_vector(params: ModelParams) -> np.ndarray:
    if params.family is Family.GUMBEL:
        return np.array([params.mu, params.sigma])
    return np.array([params.mu, params.sigma, params.xi])


def params_from_vector(family: Family, theta, sign=None) -> ModelParams:
    family = Family(family)
    if family is Family.GUMBEL:
        return ModelParams.gumbel(theta[0], theta[1])
    if family is Family.GEV:
        return ModelParams.gev(*theta[:3])
    return ModelParams.pgev(theta[0], theta[1], theta[2], sign)


def pgev_loglik(params: ModelParams, data) -> float:
    """Sum of PGEV log densities; -inf when any observation is off support."""
    data = _as_dataset(data)
    sgn = data.common_sign()
    if sgn != params.support_sign:
        return -math.inf
    w = np.log(np.abs(data.values))
    return kernels.pgev_loglik(w, sgn, params.mu, params.sigma, params.xi)


def loglik(params: ModelParams, data) -> float:
    data = _as_dataset(data)
    fam = params.family
    if fam is Family.PGEV:
        return pgev_loglik(params, data)
    if fam is Family.GEV:
        return kernels.gev_loglik(data.values, params.mu, params.sigma, params.xi)
    if fam is Family.GUMBEL:
        return kernels.gev_loglik(data.values, params.mu, params.sigma, 0.0)
    raise ValueError(f"no likelihood for family {fam.value}")


def numerical_hessian(func: Callable[[np.ndarray], float], theta,
                      steps=None) -> np.ndarray:
    """Central-difference Hessian, symmetrized."""
    theta = np.asarray(theta, dtype=float)
    k = theta.size
    h = np.maximum(1e-5, 1e-5 * np.abs(theta)) if steps is None else np.asarray(steps, float)
    f0 = func(theta)
    if not math.isfinite(f0):
        raise BoundaryError(f"function not finite at {theta}")

    def ev(delta):
        v = func(theta + delta)
        if not math.isfinite(v):
            raise BoundaryError(f"function not finite at {theta + delta}")
        return v

    hess = np.empty((k, k))
    eye = np.eye(k)
    for i in range(k):
        ei = eye[i] * h[i]
        hess[i, i] = (ev(ei) - 2 * f0 + ev(-ei)) / (h[i] * h[i])
        for j in range(i + 1, k):
            ej = eye[j] * h[j]
            hess[i, j] = (ev(ei + ej) - ev(ei - ej) - ev(-ei + ej) + ev(-ei - ej)) / (
                4 * h[i] * h[j])
            hess[j, i] = hess[i, j]
    return (hess + hess.T) / 2


def observed_information(params: ModelParams, data) -> np.ndarray:
    """Negative Hessian of the log-likelihood in (mu, sigma[, xi])."""
    data = _as_dataset(data)
    fam, sign = params.family, params.support_sign

    def f(theta):
        if theta[1] <= 0:
            return -math.inf
        return loglik(params_from_vector(fam, theta, sign), data)

    return -numerical_hessian(f, param_vector(params))


def _invert_information(info) -> np.ndarray:
    info = np.asarray(info, float)
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        cond = np.linalg.cond(info) if np.all(np.isfinite(info)) else math.inf
        raise SingularInformation(
            f"information matrix is not positive definite (condition {cond:.3g})", cond)
    return np.linalg.inv(info)


def default_init(data: Dataset, family: Family) -> ModelParams:
    """Gumbel moment matching, on log|x| for PGEV."""
    family = Family(family)
    if family is Family.PGEV:
        sgn = data.common_sign()
        w = np.log(np.abs(data.values))
        s = float(np.std(w, ddof=1)) if w.size > 1 else 1.0
        s = s if s > 0 else 1.0
        # log|X| is GEV(mu, sigma, xi) on the positive branch, -log|X| on the negative one
        mu0 = float(np.mean(w)) - sgn * 0.45006 * s
        return ModelParams.pgev(mu0, 0.7797 * s, -0.1, sgn)
    x = data.values
    s = float(np.std(x, ddof=1)) if x.size > 1 else 1.0
    s = s if s > 0 else 1.0
    mu0 = float(np.mean(x)) - 0.45006 * s
    if family is Family.GUMBEL:
        return ModelParams.gumbel(mu0, 0.7797 * s)
    return ModelParams.gev(mu0, 0.7797 * s, -0.1)


def _feasible_init(data: Dataset, init: ModelParams) -> ModelParams:
    if math.isfinite(loglik(init, data)):
        return init
    if init.family is Family.GUMBEL:
        raise ValueError("no finite starting point for the Gumbel fit")
    for xi0 in (0.1, -0.01, 0.01, -0.3, 0.3, 1e-6):
        for scale in (1.0, 2.0, 5.0):
            cand = params_from_vector(init.family, [init.mu, init.sigma * scale, xi0],
                                      init.support_sign)
            if math.isfinite(loglik(cand, data)):
                return cand
    raise ValueError("could not find a starting point with finite likelihood")


def _shape_warnings(xi) -> list:
    out = []
    if xi is None:
        return out
    if xi <= -0.5:
        out.append(SHAPE_LOW_WARNING)
    if xi >= 1:
        out.append(SHAPE_HIGH_WARNING)
    return out


def fit_mle(data, family=Family.PGEV, init: Optional[ModelParams] = None,
            maxiter: int = 5000, xatol: float = 1e-8, fatol: float = 1e-10) -> FitResult:
    """Nelder-Mead maximization of the log-likelihood over (mu, log sigma, xi).

    The simplex is restarted once from the best vertex to guard against
    premature collapse. ``converged`` is False when the iteration cap is hit.
    """
    data = _as_dataset(data)
    family = Family(family)
    if family not in FITTABLE:
        raise ValueError(f"cannot fit family {family.value}")
    sign = data.common_sign() if family is Family.PGEV else None
    start = _feasible_init(data, init if init is not None else default_init(data, family))
    if family is Family.PGEV:
        w = np.log(np.abs(data.values))

        def negll(v):
            return -kernels.pgev_loglik(w, sign, v[0], math.exp(v[1]), v[2])
    elif family is Family.GEV:
        x = data.values

        def negll(v):
            return -kernels.gev_loglik(x, v[0], math.exp(v[1]), v[2])
    else:
        x = data.values

        def negll(v):
            return -kernels.gev_loglik(x, v[0], math.exp(v[1]), 0.0)

    v0 = [start.mu, math.log(start.sigma)] + ([] if family is Family.GUMBEL else [start.xi])
    v0 = np.array(v0)
    steps = np.array([0.1 * start.sigma, 0.1, 0.05][: v0.size])
    total_iter = 0
    converged = False
    for step_scale in (1.0, 0.1):
        simplex = np.vstack([v0] + [v0 + np.eye(v0.size)[i] * steps[i] * step_scale
                                    for i in range(v0.size)])
        res = optimize.minimize(
            negll, v0, method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": xatol, "fatol": fatol,
                     "maxiter": max(maxiter - total_iter, 1), "maxfev": 4 * maxiter})
        total_iter += int(res.nit)
        v0 = res.x
        converged = bool(res.success)
        if total_iter >= maxiter:
            converged = False
            break

    theta = v0.copy()
    theta[1] = math.exp(theta[1])
    params = params_from_vector(family, theta, sign)
    ll = loglik(params, data)
    warns = _shape_warnings(params.xi)
    if not converged:
        warns.append(f"Nelder-Mead did not converge within {maxiter} iterations")
    try:
        info = observed_information(params, data)
        cov = _invert_information(info)
        se = np.sqrt(np.diag(cov))
    except (BoundaryError, SingularInformation) as exc:
        info = np.full((theta.size, theta.size), np.nan) if isinstance(exc, BoundaryError) else info
        se = np.full(theta.size, np.nan)
        warns.append(f"standard errors unavailable: {exc}")
    return FitResult(params, ll, info, se, converged, total_iter, data.n, warns)


# ---------------------------------------------------------------------------
# quantile intervals
# ---------------------------------------------------------------------------

def quantile_gradient(params: ModelParams, p: float) -> np.ndarray:
    """Gradient of the p-quantile in (mu, sigma, xi), or (mu, sigma) for Gumbel."""
    y = -math.log(p)
    fam = params.family
    mu, sigma, xi = params.mu, params.sigma, params.xi
    if fam is Family.GUMBEL:
        return np.array([1.0, -math.log(y)])
    if fam is Family.GEV:
        if abs(xi) < XI_ZERO:
            ly = math.log(y)
            return np.array([1.0, -ly, sigma * ly * ly / 2])
        r = y ** -xi
        return np.array([1.0, (r - 1) / xi,
                         -sigma / xi ** 2 * (r - 1) - sigma / xi * r * math.log(y)])
    if fam is not Family.PGEV:
        raise ValueError(f"no quantile gradient for {fam.value}")
    sgn = params.support_sign
    xp = quantile(params, p)
    if abs(xi) < XI_ZERO:
        ly = math.log(y)
        return xp * np.array([1.0, -sgn * ly, sgn * sigma * ly * ly / 2])
    r = y ** -xi
    return xp * np.array([1.0, sgn * (r - 1) / xi,
                          sgn * sigma / xi ** 2 * (r * math.log(r) - (r - 1))])


@dataclass(frozen=True)
class QuantileInterval:
    p: float
    estimate: float
    lower: float
    upper: float
    variance: float
    level: float


def quantile_ci(fit: FitResult, p: float, level: float = 0.95) -> QuantileInterval:
    """Delta-method interval for the p-quantile (cdf(x) = p)."""
    if not 0 < p < 1 or not 0 < level < 1:
        raise ValueError("p and level must lie in (0, 1)")
    cov = _invert_information(fit.info_matrix)
    grad = quantile_gradient(fit.params, p)
    var = float(grad @ cov @ grad)
    est = float(quantile(fit.params, p))
    z = specfun.std_normal_quantile(1 - (1 - level) / 2)
    half = z * math.sqrt(var)
    return QuantileInterval(p, est, est - half, est + half, var, level)
