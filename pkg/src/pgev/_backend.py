"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports, except for
samples larger than ``CROSSOVER`` where numpy's vectorized transcendentals
beat the scalar loop. Setting the environment variable ``PGEV_PURE_PYTHON``
to a non-empty value other than ``0`` forces the numpy module
``_kernels_py`` throughout.
"""
import os

import numpy as np

from . import _kernels_py

CROSSOVER = 600


def _load_compiled():
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


class _SizeDispatch:
    """Compiled kernels for small samples, numpy ones for large samples."""

    FAMILY_PGEV = _kernels_py.FAMILY_PGEV
    FAMILY_GEV = _kernels_py.FAMILY_GEV

    def __init__(self, compiled, fallback, crossover):
        self.compiled, self.fallback, self.crossover = compiled, fallback, crossover

    def _pick(self, data):
        return self.compiled if np.size(data) <= self.crossover else self.fallback

    def pgev_loglik(self, logabs, sign, mu, sigma, xi):
        return self._pick(logabs).pgev_loglik(logabs, sign, mu, sigma, xi)

    def gev_loglik(self, x, mu, sigma, xi):
        return self._pick(x).gev_loglik(x, mu, sigma, xi)

    def mwg_chain(self, data, *args):
        return self._pick(data).mwg_chain(data, *args)


_compiled = _load_compiled()

if _compiled is not None and os.environ.get("PGEV_PURE_PYTHON", "") in ("", "0"):
    kernels = _SizeDispatch(_compiled, _kernels_py, CROSSOVER)
    BACKEND = "cython"
else:
    kernels = _kernels_py
    BACKEND = "python"


def available_backends():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_backend(name: str):
    """A kernel module by name; ``"auto"`` is the size-dispatching default."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    if name == "auto":
        return kernels
    raise ValueError(f"unknown backend {name!r}")
