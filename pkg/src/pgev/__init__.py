"""Power generalized extreme value (PGEV) distributions and inference."""
from ._backend import BACKEND
from .dataset import Dataset
from .dist import Family, ModelParams, cdf, entropy, logpdf, moment, pdf, quantile, sample
from .mle import FitResult, fit_mle, quantile_ci
from .specfun import weibull_mgf

__version__ = "0.1.0"

__all__ = ["BACKEND", "Dataset", "Family", "ModelParams", "FitResult", "cdf", "entropy",
           "fit_mle", "logpdf", "moment", "pdf", "quantile", "quantile_ci", "sample",
           "weibull_mgf", "__version__"]
