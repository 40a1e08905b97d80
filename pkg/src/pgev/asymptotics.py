"""Numeric checks for p-max domains of attraction.

Tail-ratio limits, von Mises type density conditions, power norming
constants and convergence of F^n under power normalization

    P((|M_n| / delta_n)^(1/beta_n) sign(M_n) <= x) -> K(x).

Every ratio is reported together with two targets: ``stated_limit``, the
right side as it is usually written, and ``self_consistent_limit``,
-log of the standardized limit law at ``x``. Where the two disagree only
the second is a limit of the ratio.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .dist import Family, ModelParams, cdf as law_cdf
from .specfun import adaptive_quadrature


class DoaCase(str, enum.Enum):
    L1_POS_XI = "L1_pos_xi"   # r(F) = inf,      xi > 0
    L1_NEG_XI = "L1_neg_xi"   # 0 < r(F) < inf,  xi < 0
    L2_POS_XI = "L2_pos_xi"   # r(F) = 0,        xi > 0
    L2_NEG_XI = "L2_neg_xi"   # r(F) < 0,        xi < 0


BOUNDED_CASES = (DoaCase.L1_NEG_XI, DoaCase.L2_NEG_XI)
DEFAULT_T_SMALL = tuple(10.0 ** -k for k in range(1, 7))
DEFAULT_T_LARGE = tuple(10.0 ** k for k in range(1, 7))


@dataclass(frozen=True)
class ParentDistribution:
    """A parent df given by function handles.

    ``sf_logabs(w)`` and ``logabs_quantile(p)`` are optional views in the
    coordinate w = log|x| on the tail side (x > 0 when r(F) > 0, x < 0
    otherwise). They let the harness reach arguments such as e^(10^6)
    that do not fit in a double.
    """
    cdf: Callable[[float], float]
    quantile: Callable[[float], float]
    right_endpoint: float
    pdf: Optional[Callable[[float], float]] = None
    sf: Optional[Callable[[float], float]] = None
    name: str = "parent"
    sf_logabs: Optional[Callable[[float], float]] = None
    logabs_quantile: Optional[Callable[[float], float]] = None

    @property
    def tail_sign(self) -> int:
        return 1 if self.right_endpoint > 0 else -1

    def survival(self, x: float) -> float:
        return self.sf(x) if self.sf is not None else 1.0 - self.cdf(x)

    def survival_at_logabs(self, w: float) -> float:
        if self.sf_logabs is not None:
            return self.sf_logabs(w)
        try:
            x = math.exp(w)
        except OverflowError:
            x = math.inf
        return self.survival(self.tail_sign * x)

    def quantile_logabs(self, p: float) -> float:
        if self.logabs_quantile is not None:
            return self.logabs_quantile(p)
        return math.log(abs(self.quantile(p)))


@dataclass(frozen=True)
class ConvergenceTrace:
    t_values: tuple
    ratio_values: tuple
    stated_limit: float
    self_consistent_limit: float
    max_abs_gap: float

    @classmethod
    def build(cls, ts, ratios, stated, target):
        ratios = tuple(float(r) for r in ratios)
        tail = ratios[len(ratios) - max(1, len(ratios) // 3):]
        gap = max(abs(r - target) for r in tail)
        return cls(tuple(ts), ratios, float(stated), float(target), float(gap))

    @property
    def final_gap(self) -> float:
        return abs(self.ratio_values[-1] - self.self_consistent_limit)


class DoaRatio(NamedTuple):
    ratio: float
    stated_limit: float
    self_consistent_limit: float
    literal_ratio: float


class Norming(NamedTuple):
    delta: float
    beta: float
    d: float
    log_delta: float


# ---------------------------------------------------------------------------
# exactly solvable parents
# ---------------------------------------------------------------------------

def _from_sf(sf, pdf, quantile, r, name, sf_logabs=None, logabs_quantile=None):
    return ParentDistribution(lambda u: 1.0 - sf(u), quantile, r, pdf, sf, name,
                              sf_logabs, logabs_quantile)


def log_tail_parent(alpha: float = 1.0) -> ParentDistribution:
    """F-bar(u) = (log u)^-alpha on u >= e; in D_p(L_{1, 1/alpha})."""
    def sf_w(w):
        return 1.0 if w <= 1 else w ** -alpha

    def pdf(u):
        return 0.0 if u <= math.e else alpha * math.log(u) ** (-alpha - 1) / u

    def lq(p):
        return (1 - p) ** (-1 / alpha)

    return _from_sf(lambda u: 1.0 if u <= math.e else sf_w(math.log(u)), pdf,
                    lambda p: math.exp(lq(p)), math.inf, f"log-tail(alpha={alpha})", sf_w, lq)


def uniform_parent(lo: float = 0.0, hi: float = 1.0) -> ParentDistribution:
    width = hi - lo

    def sf(u):
        return min(1.0, max(0.0, (hi - u) / width))

    def pdf(u):
        return 1.0 / width if lo < u < hi else 0.0

    return _from_sf(sf, pdf, lambda p: lo + p * width, hi, f"uniform({lo}, {hi})")


def log_power_parent(r: float, alpha: float = 1.0) -> ParentDistribution:
    """Bounded parent with F-bar exactly regularly varying in the power scale.

    For r > 0: F-bar(u) = (log(r/u))^alpha on [r/e, r] (domain of L_1 with
    xi = -1/alpha); for r < 0: F-bar(u) = (log(u/r))^alpha on [r e, r]
    (domain of L_2 with xi = -1/alpha).
    """
    lr = math.log(abs(r))
    if r > 0:
        def sf_w(w):
            return 1.0 if w <= lr - 1 else 0.0 if w >= lr else (lr - w) ** alpha

        def pdf(u):
            return alpha * math.log(r / u) ** (alpha - 1) / u if r / math.e < u < r else 0.0

        def lq(p):
            return lr - (1 - p) ** (1 / alpha)

        def sf(u):
            return 1.0 if u <= 0 else sf_w(math.log(u))
    else:
        def sf_w(w):
            return 1.0 if w >= lr + 1 else 0.0 if w <= lr else (w - lr) ** alpha

        def pdf(u):
            return -alpha * math.log(u / r) ** (alpha - 1) / u if r * math.e < u < r else 0.0

        def lq(p):
            return lr + (1 - p) ** (1 / alpha)

        def sf(u):
            return 0.0 if u >= 0 else sf_w(math.log(-u))
    sgn = 1 if r > 0 else -1
    return _from_sf(sf, pdf, lambda p: sgn * math.exp(lq(p)), r,
                    f"log-power(r={r}, alpha={alpha})", sf_w, lq)


def reflected_log_tail_parent(alpha: float = 1.0) -> ParentDistribution:
    """F-bar(u) = (-log(-u))^-alpha on [-1/e, 0); in D_p(L_{2, 1/alpha})."""
    def sf_w(w):  # u = -e^w
        return 1.0 if w >= -1 else (-w) ** -alpha

    def sf(u):
        return 0.0 if u >= 0 else sf_w(math.log(-u))

    def pdf(u):
        if -1 / math.e < u < 0:
            return -alpha * (-math.log(-u)) ** (-alpha - 1) / u
        return 0.0

    def lq(p):
        return -((1 - p) ** (-1 / alpha))

    return _from_sf(sf, pdf, lambda p: -math.exp(lq(p)), 0.0,
                    f"reflected-log-tail(alpha={alpha})", sf_w, lq)


def pareto_parent(c: float = 1.0) -> ParentDistribution:
    """F-bar(u) = u^-c on u >= 1."""
    def sf_w(w):
        return 1.0 if w <= 0 else math.exp(-c * w)

    def pdf(u):
        return 0.0 if u <= 1 else c * u ** (-c - 1)

    return _from_sf(lambda u: 1.0 if u <= 1 else u ** -c, pdf, lambda p: (1 - p) ** (-1 / c),
                    math.inf, f"pareto(c={c})", sf_w, lambda p: -math.log1p(-p) / c)


def reflected_power_parent(c: float = 1.0) -> ParentDistribution:
    """F-bar(u) = (-u)^c on [-1, 0]; c = 1 is uniform(-1, 0)."""
    def sf(u):
        if u <= -1:
            return 1.0
        return 0.0 if u >= 0 else (-u) ** c

    def pdf(u):
        return c * (-u) ** (c - 1) if -1 < u < 0 else 0.0

    return _from_sf(sf, pdf, lambda p: -((1 - p) ** (1 / c)), 0.0, f"reflected-power(c={c})",
                    lambda w: 1.0 if w >= 0 else math.exp(c * w),
                    lambda p: math.log1p(-p) / c)


def lognormal_tail_parent() -> ParentDistribution:
    """F-bar(u) = exp(-(log u)^2 / 2) on u >= 1."""
    def sf_w(w):
        return 1.0 if w <= 0 else math.exp(-0.5 * w * w)

    def pdf(u):
        return 0.0 if u <= 1 else math.log(u) / u * sf_w(math.log(u))

    def lq(p):
        return math.sqrt(-2 * math.log1p(-p))

    return _from_sf(lambda u: 1.0 if u <= 1 else sf_w(math.log(u)), pdf,
                    lambda p: math.exp(lq(p)), math.inf, "lognormal-tail", sf_w, lq)


def _stable_sf_logabs(fam: Family, a):
    """Exact survival of a p-max stable law in w = log|x| on its tail side."""
    def one_minus_exp(v):  # 1 - exp(-v)
        return -math.expm1(-v)

    if fam is Family.PMAX_K1:
        return lambda w: one_minus_exp(w ** -a) if w > 0 else 1.0
    if fam is Family.PMAX_K2:
        return lambda w: one_minus_exp((-w) ** a) if w < 0 else 0.0
    if fam is Family.PMAX_K3:
        return lambda w: one_minus_exp(_exp(-w))
    if fam is Family.PMAX_K4:
        return lambda w: one_minus_exp((-w) ** -a) if w < 0 else 1.0
    if fam is Family.PMAX_K5:
        return lambda w: one_minus_exp(w ** a) if w > 0 else 0.0
    if fam is Family.PMAX_K6:
        return lambda w: one_minus_exp(_exp(w))
    return None


def stable_law_parent(params: ModelParams) -> ParentDistribution:
    """A law from the library used as a parent; p-max stable laws get exact tails."""
    from .dist import pdf as law_pdf, quantile as law_quantile, support

    return ParentDistribution(lambda x: float(law_cdf(params, x)),
                              lambda p: float(law_quantile(params, p)),
                              support(params).upper,
                              lambda x: float(law_pdf(params, x)),
                              None, f"{params.family.value}(alpha={params.xi})",
                              _stable_sf_logabs(params.family, params.xi))


# ---------------------------------------------------------------------------
# standardized limit laws
# ---------------------------------------------------------------------------

def _limit_family(case: DoaCase) -> int:
    return 1 if case in (DoaCase.L1_POS_XI, DoaCase.L1_NEG_XI) else 2


def _check_xi(case: DoaCase, xi: float):
    pos = case in (DoaCase.L1_POS_XI, DoaCase.L2_POS_XI)
    if (xi > 0) != pos or xi == 0:
        raise ValueError(f"case {case.value} needs xi {'> 0' if pos else '< 0'}, got {xi}")


def limit_z(case: DoaCase, xi: float, x: float) -> float:
    """Argument of the standardized limit: 1 + xi log x (L1) or 1 - xi log(-x) (L2)."""
    if _limit_family(case) == 1:
        if x <= 0:
            return math.nan
        return 1.0 + xi * math.log(x)
    if x >= 0:
        return math.nan
    return 1.0 - xi * math.log(-x)


def limit_cdf(case: DoaCase, xi: float, x: float) -> float:
    """Standardized L_{1,xi} or L_{2,xi} (mu = 0, sigma = 1)."""
    sign = 1 if _limit_family(case) == 1 else -1
    return float(law_cdf(ModelParams.pgev(0.0, 1.0, xi, sign), x))


def self_consistent_limit(case: DoaCase, xi: float, x: float) -> float:
    z = limit_z(case, xi, x)
    if not z > 0:
        raise ValueError(f"x={x} is outside the support of the limit law")
    return z ** (-1.0 / xi)


def stated_limit(case: DoaCase, xi: float, x: float) -> float:
    """Right-hand sides in their customary written form."""
    with np.errstate(all="ignore"):
        if case in (DoaCase.L1_POS_XI, DoaCase.L1_NEG_XI):
            return float(np.float64(math.log(x ** xi * math.e)) ** (-1.0 / xi))
        base = -math.log((-x) ** xi * math.e)
        return float(np.float64(base) ** (-1.0 / xi)) if base > 0 else math.nan


def _ratio(parent: ParentDistribution, num_w: float, den_w: float) -> float:
    """F-bar ratio with both arguments given as log|x| on the tail side."""
    den = parent.survival_at_logabs(den_w)
    if den == 0:
        raise ZeroDivisionError(f"survival is 0 at log|x| = {den_w}")
    return parent.survival_at_logabs(num_w) / den


def doa_ratio(case, parent: ParentDistribution, xi: float, x: float, t: float) -> DoaRatio:
    """Finite-t survival ratio for one of the four p-max attraction cases.

    ``ratio`` uses the argument that matches the regular-variation
    characterization (t -> inf for unbounded cases, t -> 0+ for bounded
    ones); ``literal_ratio`` evaluates the customary written left side
    at the same t for comparison.
    """
    case = DoaCase(case)
    _check_xi(case, xi)
    z = limit_z(case, xi, x)
    target = self_consistent_limit(case, xi, x)
    # arguments as log|.|: the parent's tail side fixes the sign
    if case is DoaCase.L1_POS_XI:
        num, den = t * xi * math.log(x) + t, t
        literal = num
    elif case is DoaCase.L2_POS_XI:
        num, den = xi * t * math.log(-x) - t, -t
        literal = num
    else:
        lr = math.log(abs(parent.right_endpoint))
        step = -1.0 if case is DoaCase.L1_NEG_XI else 1.0
        num, den = lr + step * t * z, lr + step * t
        literal = lr + step * t / z
    ratio = _ratio(parent, num, den)
    try:
        lit = _ratio(parent, literal, den)
    except (ZeroDivisionError, OverflowError, ValueError):
        lit = math.nan
    return DoaRatio(ratio, stated_limit(case, xi, x), target, lit)


def default_t_grid(case) -> tuple:
    case = DoaCase(case)
    return DEFAULT_T_SMALL if case in BOUNDED_CASES else DEFAULT_T_LARGE


def doa_trace(case, parent: ParentDistribution, xi: float, x: float,
              t_grid: Optional[Sequence[float]] = None) -> ConvergenceTrace:
    case = DoaCase(case)
    if t_grid is None:
        t_grid = default_t_grid(case)
    vals = [doa_ratio(case, parent, xi, x, t) for t in t_grid]
    return ConvergenceTrace.build(t_grid, [v.ratio for v in vals], vals[0].stated_limit,
                                  vals[0].self_consistent_limit)


# ---------------------------------------------------------------------------
# von Mises type conditions
# ---------------------------------------------------------------------------

def von_mises_ratio(case: int, parent: ParentDistribution, x: float) -> float:
    """Density ratio of the von Mises condition for K_case at the point x."""
    if parent.pdf is None:
        raise ValueError("von Mises conditions need a density")
    f, sf, r = parent.pdf(x), parent.survival(x), parent.right_endpoint
    if case == 1:
        return x * f * math.log(x) / sf
    if case in (2, 5):
        return x * f * math.log(r / x) / sf
    if case == 4:
        return x * f * math.log(-x) / sf
    if case in (3, 6):
        upper = r
        inner = adaptive_quadrature(lambda t: parent.survival(t) / t, x, upper,
                                    tol=1e-13, rel_tol=1e-12).value
        return x * f / sf ** 2 * inner
    raise ValueError(f"von Mises case must be 1..6, got {case}")


def von_mises_check(case: int, parent: ParentDistribution, t_grid: Sequence[float],
                    alpha: float = 1.0) -> ConvergenceTrace:
    """Evaluate the case's ratio along ``t_grid`` (points approaching r(F))."""
    target = 1.0 if case in (3, 6) else float(alpha)
    ratios = [von_mises_ratio(case, parent, t) for t in t_grid]
    return ConvergenceTrace.build(t_grid, ratios, target, target)


def phi1_ratio(parent: ParentDistribution, u: Callable[[float], float], y: float,
               t: float) -> float:
    """F-bar(t exp(y u(t))) / F-bar(t); tends to exp(-y) for F in D_p(Phi_1)."""
    return parent.survival(t * math.exp(y * u(t))) / parent.survival(t)


def psi1_ratio(parent: ParentDistribution, u: Callable[[float], float], y: float,
               t: float) -> float:
    """Same ratio; tends to exp(y) as t -> r(F) <= 0 for F in D_p(Psi_1)."""
    return parent.survival(t * math.exp(y * u(t))) / parent.survival(t)


# ---------------------------------------------------------------------------
# norming constants and convergence of F^n
# ---------------------------------------------------------------------------

def power_norming_constants(case, parent: ParentDistribution, n: int,
                            xi: float) -> Norming:
    """(delta_n, beta_n) with F^n(sign(x) delta_n |x|^beta_n) -> L(x).

    d_n is pinned by n F-bar at the (1 - 1/n) quantile being 1. ``delta``
    may overflow to inf; ``log_delta`` is always finite.
    """
    case = DoaCase(case)
    _check_xi(case, xi)
    if n < 2:
        raise ValueError("n must be at least 2")
    lq = parent.quantile_logabs(1.0 - 1.0 / n)
    if case is DoaCase.L1_POS_XI:
        d, log_delta = lq, lq
    elif case is DoaCase.L2_POS_XI:
        d = -lq
        log_delta = -d
    else:
        lr = math.log(abs(parent.right_endpoint))
        if case is DoaCase.L1_NEG_XI:
            d = lr - lq
            log_delta = lr - d
        else:
            d = lq - lr
            log_delta = lr + d
    beta = xi * d if case in (DoaCase.L1_POS_XI, DoaCase.L2_POS_XI) else -xi * d
    return Norming(_exp(log_delta), beta, d, log_delta)


def _exp(w: float) -> float:
    try:
        return math.exp(w)
    except OverflowError:
        return math.inf


def natural_norming(params: ModelParams, n: int) -> Norming:
    """Norming under which a p-max stable law reproduces itself exactly."""
    fam, a = params.family, params.xi
    table = {
        Family.PMAX_K1: lambda: (1.0, n ** (1 / a)),
        Family.PMAX_K2: lambda: (1.0, n ** (-1 / a)),
        Family.PMAX_K3: lambda: (float(n), 1.0),
        Family.PMAX_K4: lambda: (1.0, n ** (1 / a)),
        Family.PMAX_K5: lambda: (1.0, n ** (-1 / a)),
        Family.PMAX_K6: lambda: (1.0 / n, 1.0),
    }
    if fam not in table:
        raise ValueError(f"{fam.value} is not a p-max stable law")
    delta, beta = table[fam]()
    return Norming(delta, beta, math.nan, math.log(delta))


def normalized_point(norming: Norming, x: float) -> float:
    return math.copysign(_exp(norming.log_delta + norming.beta * math.log(abs(x))), x)


def _survival_normalized(parent: ParentDistribution, norming: Norming, x: float) -> float:
    w = norming.log_delta + norming.beta * math.log(abs(x))
    if (x > 0) == (parent.tail_sign > 0):
        return parent.survival_at_logabs(w)
    return parent.survival(math.copysign(_exp(w), x))


def n_survival_at(parent: ParentDistribution, norming: Norming, n: int, x: float) -> float:
    """n F-bar at the power-normalized point; tends to -log of the limit cdf."""
    return n * _survival_normalized(parent, norming, x)


def _power_of_cdf(parent: ParentDistribution, norming: Norming, n: int, x: float) -> float:
    sf = _survival_normalized(parent, norming, x)
    if sf >= 1.0:
        return 0.0
    return math.exp(n * math.log1p(-sf))


def pmax_convergence(parent: ParentDistribution, case, x: float, n_grid: Sequence[int],
                     xi: Optional[float] = None) -> ConvergenceTrace:
    """F^n at the power-normalized point along ``n_grid``.

    ``case`` is a :class:`DoaCase` (constants from the parent quantile, limit
    L_{i,xi}) or a p-max stable ``ModelParams`` (natural norming, limit the
    law itself).
    """
    if x == 0:
        raise ValueError("x must be nonzero")
    if isinstance(case, ModelParams):
        limit = float(law_cdf(case, x))
        vals = [_power_of_cdf(parent, natural_norming(case, n), n, x) for n in n_grid]
    else:
        case = DoaCase(case)
        limit = limit_cdf(case, xi, x)
        vals = [_power_of_cdf(parent, power_norming_constants(case, parent, n, xi), n, x)
                for n in n_grid]
    return ConvergenceTrace.build(n_grid, vals, limit, limit)


def pmax_stable_cdf(kind, alpha, x):
    fam = Family(kind.lower() if isinstance(kind, str) else kind)
    needs_alpha = fam not in (Family.PMAX_K3, Family.PMAX_K6)
    return law_cdf(ModelParams.pmax(fam, alpha if needs_alpha else None), x)
