"""PGEV, GEV, Gumbel and the six p-max stable laws.

The PGEV law with location ``mu``, scale ``sigma`` and shape ``xi`` has
distribution function

    exp(-(1 + (xi/sigma) * sign(x) * (log|x| - mu))_+ ** (-1/xi))

Each parameterization lives on one branch, positive (log-GEV) or negative
(negative log-GEV), selected by ``support_sign``. Internally every PGEV
quantity is computed on the log scale ``w = log|x|``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import specfun
from .dataset import Dataset

XI_ZERO = 1e-8


class Family(str, enum.Enum):
    PGEV = "pgev"
    GEV = "gev"
    GUMBEL = "gumbel"
    PMAX_K1 = "k1"
    PMAX_K2 = "k2"
    PMAX_K3 = "k3"
    PMAX_K4 = "k4"
    PMAX_K5 = "k5"
    PMAX_K6 = "k6"


PMAX_FAMILIES = (Family.PMAX_K1, Family.PMAX_K2, Family.PMAX_K3,
                 Family.PMAX_K4, Family.PMAX_K5, Family.PMAX_K6)
_PMAX_WITH_ALPHA = (Family.PMAX_K1, Family.PMAX_K2, Family.PMAX_K4, Family.PMAX_K5)


class MomentUndefined(ValueError):
    pass


class EntropyUndefined(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Parameter point of one family.

    For the p-max stable laws ``xi`` carries the exponent alpha and
    ``mu``/``sigma`` stay at 0/1.
    """

    family: Family
    mu: float = 0.0
    sigma: float = 1.0
    xi: Optional[float] = None
    support_sign: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        fam = self.family
        if fam is Family.PGEV:
            if self.support_sign not in (1, -1):
                raise ValueError("PGEV needs support_sign of +1 or -1")
        elif self.support_sign is not None:
            raise ValueError("support_sign is only defined for PGEV")
        if fam in (Family.PGEV, Family.GEV) and self.xi is None:
            raise ValueError(f"{fam.value} needs a shape parameter")
        if fam in (Family.GUMBEL, Family.PMAX_K3, Family.PMAX_K6) and self.xi is not None:
            raise ValueError(f"{fam.value} takes no shape parameter")
        if fam in _PMAX_WITH_ALPHA and not (self.xi is not None and self.xi > 0):
            raise ValueError(f"{fam.value} needs alpha > 0")

    @classmethod
    def pgev(cls, mu, sigma, xi, sign=1):
        return cls(Family.PGEV, float(mu), float(sigma), float(xi), int(sign))

    @classmethod
    def gev(cls, mu, sigma, xi):
        return cls(Family.GEV, float(mu), float(sigma), float(xi))

    @classmethod
    def gumbel(cls, mu, sigma):
        return cls(Family.GUMBEL, float(mu), float(sigma))

    @classmethod
    def pmax(cls, kind, alpha=None):
        fam = Family(kind.lower() if isinstance(kind, str) else kind)
        return cls(fam, xi=None if alpha is None else float(alpha))

    @property
    def alpha(self):
        return self.xi

    def as_dict(self) -> dict:
        return {"family": self.family.value, "mu": self.mu, "sigma": self.sigma,
                "xi": self.xi, "support_sign": self.support_sign}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(Family(d["family"]), d.get("mu", 0.0), d.get("sigma", 1.0),
                   d.get("xi"), d.get("support_sign"))


@dataclass(frozen=True)
class SupportInterval:
    lower: float
    upper: float
    open_lower: bool = True
    open_upper: bool = True

    def __contains__(self, x) -> bool:
        lo = x > self.lower if self.open_lower else x >= self.lower
        hi = x < self.upper if self.open_upper else x <= self.upper
        return bool(lo and hi)


def pgev_limit_gev(mu: float, sigma: float, sign: int) -> ModelParams:
    """GEV law equal to the zero-shape PGEV branch.

    The positive branch at xi = 0 is Frechet in x with scale e^mu and shape
    1/sigma, i.e. GEV(e^mu, sigma e^mu, sigma); the negative branch is its
    reflection GEV(-e^mu, sigma e^mu, -sigma).
    """
    s = math.exp(mu)
    return ModelParams.gev(sign * s, sigma * s, sign * sigma)


# ---------------------------------------------------------------------------
# support
# ---------------------------------------------------------------------------

def support(params: ModelParams) -> SupportInterval:
    fam, mu, sigma, xi = params.family, params.mu, params.sigma, params.xi
    inf = math.inf
    if fam is Family.PGEV:
        sgn = params.support_sign
        if abs(xi) < XI_ZERO:
            return SupportInterval(0.0, inf) if sgn > 0 else SupportInterval(-inf, 0.0)
        if sgn > 0:
            if xi > 0:
                return SupportInterval(math.exp(mu - sigma / xi), inf)
            return SupportInterval(0.0, math.exp(mu + sigma / abs(xi)))
        if xi > 0:
            return SupportInterval(-math.exp(mu + sigma / xi), 0.0)
        return SupportInterval(-inf, -math.exp(mu - sigma / abs(xi)))
    if fam is Family.GEV:
        if abs(xi) < XI_ZERO:
            return SupportInterval(-inf, inf)
        edge = mu - sigma / xi
        return SupportInterval(edge, inf) if xi > 0 else SupportInterval(-inf, edge)
    if fam is Family.GUMBEL:
        return SupportInterval(-inf, inf)
    return {
        Family.PMAX_K1: SupportInterval(1.0, inf),
        Family.PMAX_K2: SupportInterval(0.0, 1.0),
        Family.PMAX_K3: SupportInterval(0.0, inf),
        Family.PMAX_K4: SupportInterval(-1.0, 0.0),
        Family.PMAX_K5: SupportInterval(-inf, -1.0),
        Family.PMAX_K6: SupportInterval(-inf, 0.0),
    }[fam]


# ---------------------------------------------------------------------------
# broadcasting kernels (x may be an array, parameters may be arrays too)
# ---------------------------------------------------------------------------

def _gev_reduced(z, xi):
    """Return (s, t) with s = 1 + xi z and t = s^(-1/xi) (Gumbel limit near 0).

    Outside the support t is set to +inf (xi > 0 side) or 0 (xi < 0 side).
    """
    z, xi = np.broadcast_arrays(np.asarray(z, float), np.asarray(xi, float))
    small = np.abs(xi) < XI_ZERO
    safe_xi = np.where(small, 1.0, xi)
    s = 1.0 + xi * z
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t_reg = np.exp(-np.log1p(safe_xi * z) / safe_xi)
        t_gum = np.exp(-z)
    t = np.where(small, t_gum, t_reg)
    out = ~small & (s <= 0)
    t = np.where(out & (xi > 0), np.inf, t)
    t = np.where(out & (xi < 0), 0.0, t)
    return s, t, small, out


def _gev_logpdf_reduced(z, xi, log_sigma):
    s, t, small, out = _gev_reduced(z, xi)
    xi = np.broadcast_to(np.asarray(xi, float), s.shape)
    safe_xi = np.where(small, 1.0, xi)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lp_reg = -log_sigma - (1.0 + 1.0 / safe_xi) * np.log1p(safe_xi * z) - t
        lp_gum = -log_sigma - z - t
    lp = np.where(small, lp_gum, lp_reg)
    return np.where(out | ~np.isfinite(t), -np.inf, lp)


def _pgev_parts(x, mu, sigma, xi, sign):
    x = np.asarray(x, float)
    on_branch = np.sign(x) == sign
    with np.errstate(divide="ignore"):
        w = np.log(np.abs(x))
    w = np.where(on_branch, w, 0.0)
    z = sign * (w - mu) / sigma
    return on_branch, w, z


def pgev_cdf(x, mu, sigma, xi, sign):
    on_branch, w, z = _pgev_parts(x, mu, sigma, xi, sign)
    _, t, _, _ = _gev_reduced(z, xi)
    with np.errstate(over="ignore"):
        val = np.exp(-t)
    # off-branch mass: positive branch -> 0 for x <= 0, negative branch -> 1 for x >= 0
    off = 0.0 if sign > 0 else 1.0
    return np.where(on_branch, val, off)


def pgev_logpdf(x, mu, sigma, xi, sign):
    on_branch, w, z = _pgev_parts(x, mu, sigma, xi, sign)
    lp = _gev_logpdf_reduced(z, xi, np.log(sigma)) - w
    return np.where(on_branch, lp, -np.inf)


def pgev_quantile(p, mu, sigma, xi, sign):
    y = -np.log(p)
    xi = np.asarray(xi, float)
    small = np.abs(xi) < XI_ZERO
    safe_xi = np.where(small, 1.0, xi)
    with np.errstate(over="ignore", divide="ignore"):
        core = np.where(small, -np.log(y), np.expm1(-safe_xi * np.log(y)) / safe_xi)
        return sign * np.exp(mu + sigma * sign * core)


def gev_cdf(x, mu, sigma, xi):
    z = (np.asarray(x, float) - mu) / sigma
    _, t, _, _ = _gev_reduced(z, xi)
    return np.exp(-t)


def gev_logpdf(x, mu, sigma, xi):
    z = (np.asarray(x, float) - mu) / sigma
    return _gev_logpdf_reduced(z, xi, np.log(sigma))


def gev_quantile(p, mu, sigma, xi):
    y = -np.log(p)
    xi = np.asarray(xi, float)
    small = np.abs(xi) < XI_ZERO
    safe_xi = np.where(small, 1.0, xi)
    core = np.where(small, -np.log(y), np.expm1(-safe_xi * np.log(y)) / safe_xi)
    return mu + sigma * core


# p-max stable laws -----------------------------------------------------------

def pmax_cdf(kind: Family, alpha, x):
    x = np.asarray(x, float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if kind is Family.PMAX_K1:
            lg = np.log(np.where(x >= 1, x, 1.0))
            return np.where(x < 1, 0.0, np.exp(-lg ** -alpha))
        if kind is Family.PMAX_K2:
            lg = -np.log(np.clip(x, 0.0, 1.0))
            return np.where(x < 0, 0.0, np.where(x >= 1, 1.0, np.exp(-lg ** alpha)))
        if kind is Family.PMAX_K3:
            return np.where(x <= 0, 0.0, np.exp(-1.0 / np.where(x > 0, x, 1.0)))
        if kind is Family.PMAX_K4:
            ax = np.clip(-x, 0.0, 1.0)
            lg = -np.log(ax)
            return np.where(x < -1, 0.0, np.where(x >= 0, 1.0, np.exp(-lg ** -alpha)))
        if kind is Family.PMAX_K5:
            lg = np.log(np.where(x < -1, -x, 1.0))
            return np.where(x < -1, np.exp(-lg ** alpha), 1.0)
        if kind is Family.PMAX_K6:
            return np.where(x < 0, np.exp(-np.abs(x)), 1.0)
    raise ValueError(f"not a p-max stable law: {kind}")


def pmax_logpdf(kind: Family, alpha, x):
    x = np.asarray(x, float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if kind is Family.PMAX_K1:
            inside = x > 1
            xs = np.where(inside, x, math.e)
            lg = np.log(xs)
            lp = math.log(alpha) - (alpha + 1) * np.log(lg) - np.log(xs) - lg ** -alpha
        elif kind is Family.PMAX_K2:
            inside = (x > 0) & (x < 1)
            xs = np.where(inside, x, 1 / math.e)
            lg = -np.log(xs)
            lp = math.log(alpha) + (alpha - 1) * np.log(lg) - np.log(xs) - lg ** alpha
        elif kind is Family.PMAX_K3:
            inside = x > 0
            xs = np.where(inside, x, 1.0)
            lp = -2 * np.log(xs) - 1.0 / xs
        elif kind is Family.PMAX_K4:
            inside = (x > -1) & (x < 0)
            xs = np.where(inside, x, -1 / math.e)
            lg = -np.log(-xs)
            lp = math.log(alpha) - (alpha + 1) * np.log(lg) - np.log(-xs) - lg ** -alpha
        elif kind is Family.PMAX_K5:
            inside = x < -1
            xs = np.where(inside, x, -math.e)
            lg = np.log(-xs)
            lp = math.log(alpha) + (alpha - 1) * np.log(lg) - np.log(-xs) - lg ** alpha
        elif kind is Family.PMAX_K6:
            inside = x < 0
            xs = np.where(inside, x, -1.0)
            lp = xs
        else:
            raise ValueError(f"not a p-max stable law: {kind}")
    return np.where(inside, lp, -np.inf)


def pmax_quantile(kind: Family, alpha, p):
    y = -np.log(np.asarray(p, float))
    if kind is Family.PMAX_K1:
        return np.exp(y ** (-1.0 / alpha))
    if kind is Family.PMAX_K2:
        return np.exp(-(y ** (1.0 / alpha)))
    if kind is Family.PMAX_K3:
        return 1.0 / y
    if kind is Family.PMAX_K4:
        return -np.exp(-(y ** (-1.0 / alpha)))
    if kind is Family.PMAX_K5:
        return -np.exp(y ** (1.0 / alpha))
    if kind is Family.PMAX_K6:
        return -y
    raise ValueError(f"not a p-max stable law: {kind}")


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------

def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def cdf(params: ModelParams, x):
    fam = params.family
    if fam is Family.PGEV:
        out = pgev_cdf(x, params.mu, params.sigma, params.xi, params.support_sign)
    elif fam is Family.GEV:
        out = gev_cdf(x, params.mu, params.sigma, params.xi)
    elif fam is Family.GUMBEL:
        out = gev_cdf(x, params.mu, params.sigma, 0.0)
    else:
        out = pmax_cdf(fam, params.xi, x)
    return _scalar(out)


def logpdf(params: ModelParams, x):
    fam = params.family
    if fam is Family.PGEV:
        out = pgev_logpdf(x, params.mu, params.sigma, params.xi, params.support_sign)
    elif fam is Family.GEV:
        out = gev_logpdf(x, params.mu, params.sigma, params.xi)
    elif fam is Family.GUMBEL:
        out = gev_logpdf(x, params.mu, params.sigma, 0.0)
    else:
        out = pmax_logpdf(fam, params.xi, x)
    return _scalar(out)


def pdf(params: ModelParams, x):
    return _scalar(np.exp(logpdf(params, x)))


def quantile(params: ModelParams, p):
    """Conventional p-quantile, the solution of cdf(x) = p."""
    arr = np.asarray(p, float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise ValueError("quantile requires 0 < p < 1")
    fam = params.family
    if fam is Family.PGEV:
        out = pgev_quantile(arr, params.mu, params.sigma, params.xi, params.support_sign)
    elif fam is Family.GEV:
        out = gev_quantile(arr, params.mu, params.sigma, params.xi)
    elif fam is Family.GUMBEL:
        out = gev_quantile(arr, params.mu, params.sigma, 0.0)
    else:
        out = pmax_quantile(fam, params.xi, arr)
    return _scalar(out)


def sample(params: ModelParams, n: int, gen: np.random.Generator) -> Dataset:
    """Inverse-transform draws; the stream is fixed by the generator state."""
    if n < 1:
        raise ValueError("sample size must be at least 1")
    u = specfun.rng_uniform(gen, int(n))
    x = np.asarray(quantile(params, u), float).reshape(-1)
    if not np.all(np.isfinite(x)) or (params.family is Family.PGEV and np.any(x == 0)):
        raise OverflowError("a draw lies outside double range; the tail is too heavy "
                            "for these parameters")
    return Dataset(x)


# moments -----------------------------------------------------------------------

def _check_moment_case(params: ModelParams):
    if params.family is not Family.PGEV:
        raise MomentUndefined(f"moments are provided for PGEV only, not {params.family.value}")
    xi, sgn = params.xi, params.support_sign
    if abs(xi) < XI_ZERO:
        raise MomentUndefined("moment formulas need xi != 0")
    if sgn > 0 and xi > 0:
        raise MomentUndefined("positive branch with xi > 0 has no finite moments")
    if sgn < 0 and xi < 0:
        raise MomentUndefined("negative branch with xi < 0 has no finite moments")


def moment(params: ModelParams, k: int) -> float:
    """E|X|^k through the Laplace transforms of the standard Weibull law."""
    if k <= 0:
        raise ValueError("moment order must be positive")
    _check_moment_case(params)
    mu, sigma, xi = params.mu, params.sigma, params.xi
    if params.support_sign > 0:
        return math.exp(k * (mu - sigma / xi)) * specfun.weibull_mgf(
            k * sigma / abs(xi), 1.0 / abs(xi))
    return math.exp(k * (mu + sigma / xi)) * specfun.inv_weibull_mgf(
        k * sigma / xi, 1.0 / xi)


def signed_moment(params: ModelParams, k: int) -> float:
    """E X^k; the sign of X is the constant support_sign."""
    m = moment(params, k)
    return m * params.support_sign ** k


def central_moment(params: ModelParams, k: int) -> float:
    """E(X - EX)^k expanded binomially in the raw moments."""
    mean = signed_moment(params, 1)
    total = 0.0
    for j in range(k + 1):
        raw = 1.0 if j == k else signed_moment(params, k - j)
        total += math.comb(k, j) * (-1) ** j * mean ** j * raw
    return total


def variance(params: ModelParams) -> float:
    return central_moment(params, 2)


def entropy(params: ModelParams) -> float:
    """Shannon entropy in closed form."""
    fam = params.family
    g = specfun.EULER_GAMMA
    if fam is Family.GEV:
        return math.log(params.sigma) + (params.xi + 1.0) * g + 1.0
    if fam is Family.GUMBEL:
        return math.log(params.sigma) + g + 1.0
    if fam is not Family.PGEV:
        raise EntropyUndefined(f"no closed-form entropy for {fam.value}")
    mu, sigma, xi, sgn = params.mu, params.sigma, params.xi, params.support_sign
    if abs(xi) < XI_ZERO:
        # zero-shape limit: (sigma/xi)(Gamma(1-xi) - 1) -> sigma * gamma
        return mu + math.log(sigma) + g + sgn * sigma * g + 1.0
    if xi > 0:
        raise EntropyUndefined("PGEV entropy is treated as undefined for xi > 0")
    return (mu + math.log(sigma) + (1.0 + xi) * g
            + (sigma / xi) * sgn * (specfun.gamma_fn(1.0 - xi) - 1.0) + 1.0)


def mean_log_abs(params: ModelParams) -> float:
    """E log|X| for a PGEV branch (finite for xi < 1)."""
    if params.family is not Family.PGEV:
        raise ValueError("mean_log_abs is defined for PGEV")
    mu, sigma, xi, sgn = params.mu, params.sigma, params.xi, params.support_sign
    if abs(xi) < XI_ZERO:
        return mu + sgn * sigma * specfun.EULER_GAMMA
    if xi >= 1:
        raise MomentUndefined("E log|X| is infinite for xi >= 1")
    return mu + sgn * (sigma / xi) * (specfun.gamma_fn(1.0 - xi) - 1.0)
