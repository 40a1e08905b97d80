"""Chen-Balakrishnan Cramer-von Mises and Anderson-Darling statistics.

The fitted distribution function turns the sample into uniforms, which are
pushed through the normal quantile, standardized, and mapped back; W^2 and
A^2 are then computed and modified for sample size. Critical values are not
bundled: decisions need a table supplied by the caller.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from . import specfun
from .dataset import Dataset
from .dist import cdf


class GofError(ValueError):
    pass


@dataclass(frozen=True)
class GofReport:
    w2: float
    a2: float
    c_modified: float
    a_modified: float
    n: int
    reject_c: Optional[bool] = None
    reject_a: Optional[bool] = None
    level: Optional[float] = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("w2", "a2", "c_modified", "a_modified", "n", "reject_c", "reject_a", "level")}


def uniformize(data, fitted_cdf: Callable) -> np.ndarray:
    values = data.values if isinstance(data, Dataset) else np.asarray(data, float)
    x = np.sort(values)
    v = np.asarray(fitted_cdf(x), float)
    bad = np.flatnonzero(~((v > 0) & (v < 1)))
    if bad.size:
        i = bad[0]
        raise GofError(f"observation {x[i]!r} has fitted cdf {v[i]!r}; "
                       "it lies at or outside the fitted support")
    y = specfun.std_normal_quantile(v)
    y = np.atleast_1d(y)
    s = np.std(y, ddof=1)
    if not s > 0:
        raise GofError("normal scores have zero spread")
    return np.asarray(specfun.std_normal_cdf((y - y.mean()) / s), float)


def compute_statistics(u) -> GofReport:
    u = np.asarray(u, float)
    n = u.size
    if n == 0:
        raise GofError("no values")
    if np.any(np.diff(u) < 0):
        raise GofError("u must be sorted ascending")
    if np.any((u <= 0) | (u >= 1)):
        raise GofError("u must lie strictly inside (0, 1)")
    i = np.arange(1, n + 1)
    w2 = float(np.sum((u - (2 * i - 1) / (2 * n)) ** 2) + 1 / (12 * n))
    a2 = float(-n - np.sum((2 * i - 1) * np.log(u) + (2 * n + 1 - 2 * i) * np.log1p(-u)) / n)
    return GofReport(w2, a2, w2 * (1 + 0.5 / n), a2 * (1 + 0.75 / n + 2.25 / n ** 2), n)


def critical_value(table: Mapping, statistic: str, level: float) -> float:
    """Look up a critical value in ``{"C": {"0.05": 0.126, ...}, "A": {...}}``."""
    entries = table[statistic]
    for key, val in entries.items():
        if math.isclose(float(key), level, rel_tol=1e-9):
            return float(val)
    raise KeyError(f"no {statistic} critical value for level {level}")


def load_critical_values(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def decide(report: GofReport, table: Mapping, level: float = 0.05) -> GofReport:
    c_crit = critical_value(table, "C", level)
    a_crit = critical_value(table, "A", level)
    return GofReport(report.w2, report.a2, report.c_modified, report.a_modified, report.n,
                     report.c_modified > c_crit, report.a_modified > a_crit, level)


def gof_test(data, fit, table: Optional[Mapping] = None, level: float = 0.05) -> GofReport:
    """Statistics for ``data`` under a fitted law (a FitResult or ModelParams)."""
    params = getattr(fit, "params", fit)
    report = compute_statistics(uniformize(data, lambda x: cdf(params, x)))
    return decide(report, table, level) if table is not None else report
