"""Special functions and numeric kernels.

Gamma (Lanczos), error function, standard normal cdf/quantile, the
generalized hypergeometric series, Laplace transforms of the standard
Weibull law, adaptive quadrature and the seeded random stream used by the
samplers.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import integrate, special

EULER_GAMMA = 0.57721566490153286061

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

SERIES_TOL = 1e-12
SERIES_MAX_TERMS = 10_000
RATIONAL_MAX_DENOMINATOR = 50


class PoleError(ValueError):
    """Argument sits on a pole of the function."""


class SeriesNonConvergence(ArithmeticError):
    """A series ran out of its term budget or diverged."""


class QuadratureError(ArithmeticError):
    """The integrand produced a non-finite value."""


class AccuracyWarning(UserWarning):
    """A numeric routine could not certify the requested accuracy."""


def gamma_fn(x: float) -> float:
    """Gamma function by the Lanczos approximation with reflection."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def erf_fn(x: float) -> float:
    return math.erf(x)


def std_normal_cdf(x):
    """Standard normal distribution function; accepts scalars or arrays."""
    out = special.ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


def std_normal_quantile(p):
    """Inverse of :func:`std_normal_cdf` on the open unit interval."""
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise ValueError("std_normal_quantile requires 0 < p < 1")
    out = special.ndtri(arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class HypergeomSpec:
    upper: tuple
    lower: tuple
    argument: object

    def __post_init__(self):
        for b in self.lower:
            if b <= 0 and b == int(b):
                raise PoleError(f"lower parameter {b} is a non-positive integer")


def gen_hypergeom(spec: HypergeomSpec, tol: float = SERIES_TOL,
                  max_terms: int = SERIES_MAX_TERMS):
    """Partial sums of sum_k prod (a_i)_k / prod (b_j)_k * x^k / k!.

    Arithmetic follows the type of the parameters, so passing
    ``mpmath.mpf`` values evaluates the series in extended precision.
    Summation stops once three consecutive terms fall below
    ``tol * |partial sum|``.
    """
    upper, lower, x = spec.upper, spec.lower, spec.argument
    p, q = len(upper), len(lower)
    term = x * 0 + 1
    total = term
    small_run = 0
    for k in range(max_terms):
        num = 1
        for a in upper:
            num *= a + k
        if num == 0:
            return total  # terminating series
        den = k + 1
        for b in lower:
            den *= b + k
        term = term * num / den * x
        total += term
        if not (abs(term) < math.inf):
            raise SeriesNonConvergence("hypergeometric series overflowed")
        if abs(term) < tol * abs(total):
            small_run += 1
            if small_run >= 3:
                return total
        else:
            small_run = 0
        if p > q + 1 and k > 50 and abs(term) > abs(total):
            raise SeriesNonConvergence("series with p > q+1 diverges")
    raise SeriesNonConvergence(
        f"no convergence within {max_terms} terms (p={p}, q={q}, x={x})")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    accurate: bool = True


def adaptive_quadrature(integrand: Callable[[float], float], lower: float,
                        upper: float, tol: float = 1e-10,
                        points: Sequence[float] | None = None,
                        rel_tol: float = 1e-12) -> QuadratureResult:
    """Globally adaptive Gauss-Kronrod integration (QUADPACK).

    Infinite limits are mapped onto finite ones; ``points`` splits the range
    at known kinks or integrable singularities.
    """
    bad = []

    def f(x):
        v = integrand(x)
        if v != v:
            bad.append(x)
            return 0.0
        return v

    if lower == upper:
        return QuadratureResult(0.0, 0.0, 1)
    sign = 1.0
    if lower > upper:
        lower, upper, sign = upper, lower, -1.0
    cuts = [lower]
    if points:
        cuts += sorted(p for p in points if lower < p < upper)
    cuts.append(upper)

    value = err = 0.0
    neval = 0
    accurate = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(cuts[:-1], cuts[1:]):
            res = integrate.quad(f, a, b, epsabs=tol, epsrel=rel_tol,
                                 limit=500, full_output=1)
            v, e, info = res[0], res[1], res[2]
            if len(res) > 3:
                accurate = False
            value += v
            err += e
            neval += info["neval"]
    if bad:
        raise QuadratureError(f"integrand returned NaN at x={bad[0]!r}")
    if not math.isfinite(err):
        err, accurate = math.inf, False
    if err > tol:
        accurate = False
    return QuadratureResult(sign * value, abs(err), max(neval, 1), accurate)


# ---------------------------------------------------------------------------
# Laplace transforms of the standard Weibull law
# ---------------------------------------------------------------------------

def rational_shape(alpha: float, max_den: int = RATIONAL_MAX_DENOMINATOR):
    """Return (p, q) with alpha == p/q when alpha is rational with q <= max_den."""
    frac = Fraction(alpha).limit_denominator(max_den)
    if abs(float(frac) - alpha) <= 1e-12 * max(1.0, abs(alpha)):
        return frac.numerator, frac.denominator
    return None


def _delta(c: int, d):
    return tuple((d + i) / c for i in range(c))


def _log_max_term(t: float, alpha: float) -> float:
    """log of the largest term of the ungrouped power series for M_Y."""
    best = -math.inf
    if alpha > 1:
        # sum_n (-t)^n Gamma(1 + n/alpha) / n!
        for n in range(0, SERIES_MAX_TERMS):
            lt = n * math.log(t) + math.lgamma(1 + n / alpha) - math.lgamma(n + 1)
            best = max(best, lt)
            if n > 10 and lt < best - 60:
                break
    else:
        # alpha * sum_m (-1)^m Gamma(alpha + alpha m) / (m! t^(alpha + alpha m))
        for m in range(0, SERIES_MAX_TERMS):
            lt = (math.log(alpha) + math.lgamma(alpha * (m + 1))
                  - math.lgamma(m + 1) - alpha * (m + 1) * math.log(t))
            best = max(best, lt)
            if m > 10 and lt < best - 60:
                break
    return best


def _weibull_mgf_series(t: float, p: int, q: int, tol: float = SERIES_TOL) -> float:
    """Hypergeometric closed form of E exp(-tY), Y ~ Weibull(p/q), t > 0.

    Every term is evaluated with enough working precision to absorb the
    cancellation between the alternating hypergeometric pieces.
    """
    alpha = p / q
    # Working precision: 53 bits plus the bits lost to cancellation.
    log_value_floor = min(0.0, -alpha * math.log(t)) - 2.0
    lost = max(0.0, _log_max_term(t, alpha) - log_value_floor) / math.log(2)
    prec = 64 + int(lost) + 20
    if prec > 4000:
        raise SeriesNonConvergence("series too ill-conditioned for this t")
    with mpmath.workprec(prec):
        mpf = mpmath.mpf
        tt, pp, qq = mpf(t), mpf(p), mpf(q)
        a = pp / qq
        z = pp ** p / (tt ** p * qq ** q)
        # pieces are ~2^lost larger than the result, so truncation must be too
        inner_tol = mpf(tol) * mpf(2) ** (-int(lost) - 8)
        total = mpf(0)
        if p < q:
            arg = (-1) ** q * z
            for j in range(q):
                pref = a * (-1) ** j * mpmath.gamma(a + a * j) / (
                    mpmath.factorial(j) * tt ** (a + a * j))
                spec = HypergeomSpec((mpf(1),) + _delta(p, a + a * j),
                                     _delta(q, mpf(1 + j)), arg)
                total += pref * gen_hypergeom(spec, inner_tol)
        else:
            arg = (-1) ** p / z
            for j in range(p):
                pref = (-tt) ** j / mpmath.factorial(j) * mpmath.gamma(1 + j / a)
                spec = HypergeomSpec((mpf(1),) + _delta(q, 1 + j / a),
                                     _delta(p, mpf(1 + j)), arg)
                total += pref * gen_hypergeom(spec, inner_tol)
        return float(total)


def _weibull_mgf_quad(t: float, alpha: float) -> float:
    # y = x^alpha turns the transform into int_0^inf exp(-t y^(1/alpha) - y) dy
    inv = 1.0 / alpha
    res = adaptive_quadrature(lambda y: math.exp(-t * y ** inv - y), 0.0,
                              math.inf, tol=1e-14, points=[1.0, 10.0])
    return res.value


def weibull_mgf(t: float, alpha: float, method: str = "auto") -> float:
    """Laplace transform E exp(-tY) of the standard Weibull law Y with shape alpha.

    ``method`` is one of ``"auto"``, ``"series"``, ``"quadrature"``. The
    series route needs a rational shape p/q (denominator up to 50); ``auto``
    uses the closed forms at alpha = 1 and 2, the series for other rational
    shapes, and quadrature otherwise or when the series cannot converge.
    """
    if not alpha > 0:
        raise ValueError(f"Weibull shape must be positive, got {alpha}")
    if t < 0:
        raise ValueError(f"transform argument must be >= 0, got {t}")
    if method not in ("auto", "series", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if t == 0:
        return 1.0
    if method == "quadrature":
        return _weibull_mgf_quad(t, alpha)
    if alpha == 1:
        return 1.0 / (1.0 + t)
    if method == "auto" and alpha == 2:
        # erfc form is stable for moderate t
        return 1.0 - t * math.sqrt(math.pi) / 2 * math.exp(t * t / 4) * math.erfc(t / 2)
    pq = rational_shape(alpha)
    if pq is None:
        if method == "series":
            raise ValueError(f"series route needs a rational shape, got {alpha}")
        return _weibull_mgf_quad(t, alpha)
    try:
        return _weibull_mgf_series(t, *pq)
    except SeriesNonConvergence:
        if method == "series":
            raise
        warnings.warn(f"weibull_mgf series failed at t={t}, alpha={alpha}; "
                      "using quadrature", AccuracyWarning, stacklevel=2)
        return _weibull_mgf_quad(t, alpha)


def weibull_mgf_erfc(t: float) -> float:
    """Closed form at shape 2: 1 - t sqrt(pi)/2 exp(t^2/4) erfc(t/2)."""
    return 1.0 - t * math.sqrt(math.pi) / 2 * math.exp(t * t / 4) * math.erfc(t / 2)


def inv_weibull_mgf(t: float, alpha: float) -> float:
    """E exp(-t / Y) for the standard Weibull law Y with shape alpha."""
    if not alpha > 0:
        raise ValueError(f"Weibull shape must be positive, got {alpha}")
    if t < 0:
        raise ValueError(f"transform argument must be >= 0, got {t}")
    if t == 0:
        return 1.0
    inv = 1.0 / alpha

    def f(y):
        if y == 0.0:
            return 0.0
        return math.exp(-t * y ** -inv - y)

    # the integrand peaks near y* where t/alpha y^-(1/alpha+1) = 1
    peak = (t / alpha) ** (alpha / (1 + alpha))
    res = adaptive_quadrature(f, 0.0, math.inf, tol=1e-14,
                              points=sorted({peak / 4, peak, 4 * peak + 1}))
    return res.value


# ---------------------------------------------------------------------------
# Random stream
# ---------------------------------------------------------------------------

def rng_new(seed: int) -> np.random.Generator:
    """Seeded generator: numpy's PCG64 (permuted congruential, 128-bit state)."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def rng_uniform(gen: np.random.Generator, size=None):
    """Uniform draws on the open interval (0, 1)."""
    u = gen.random(size)
    if size is None:
        while u == 0.0:
            u = gen.random()
        return u
    zero = u == 0.0
    while zero.any():
        u[zero] = gen.random(int(zero.sum()))
        zero = u == 0.0
    return u


def rng_normal(gen: np.random.Generator, mean: float = 0.0, sd: float = 1.0,
               size=None):
    return mean + sd * gen.standard_normal(size)
