"""Exact polynomial-approximation measures of small Boolean functions."""

from .approx_lp import INF, approx_weight, best_error, hardest_distribution, min_degree, threshold_weight
from .boolfn import TruthTable, compose, make_named
from .errors import AdegLabError, CapExceededError, CertificateError, DimensionMismatchError, PreconditionError
from .exact_lp import LinearProgram, solve_ip, solve_lp
from .poly import MultilinearPoly, fourier, linf_error, weight
from .witness import DualWitness, verify

__all__ = [
    "INF",
    "AdegLabError",
    "CapExceededError",
    "CertificateError",
    "DimensionMismatchError",
    "DualWitness",
    "LinearProgram",
    "MultilinearPoly",
    "PreconditionError",
    "TruthTable",
    "approx_weight",
    "best_error",
    "compose",
    "fourier",
    "hardest_distribution",
    "linf_error",
    "make_named",
    "min_degree",
    "solve_ip",
    "solve_lp",
    "threshold_weight",
    "verify",
    "weight",
]

__version__ = "0.1.0"
