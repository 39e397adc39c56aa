"""Secrecy outage probability over generalized-K (Gamma-Gamma) fading."""

from .errors import DomainError, LargeShapeError, NonConvergenceError, UnsupportedShapeError
from .gk_model import GkParams, gk_cdf, gk_moment, gk_pdf, gk_variance, nakagami_cdf
from .montecarlo import McConfig, McResult, sop_mc
from .sop_engine import (
    DiversityReport,
    SecrecyScenario,
    SopEstimate,
    asop_distinct,
    asop_equal,
    asop_k1m1,
    diversity_report,
    sop_approx,
    sop_asymptotic,
    sop_exact,
    sop_nakagami,
    sop_rayleigh,
)

__version__ = "0.1.0"

__all__ = [
    "DiversityReport",
    "DomainError",
    "GkParams",
    "LargeShapeError",
    "McConfig",
    "McResult",
    "NonConvergenceError",
    "SecrecyScenario",
    "SopEstimate",
    "UnsupportedShapeError",
    "asop_distinct",
    "asop_equal",
    "asop_k1m1",
    "diversity_report",
    "gk_cdf",
    "gk_moment",
    "gk_pdf",
    "gk_variance",
    "nakagami_cdf",
    "sop_approx",
    "sop_asymptotic",
    "sop_exact",
    "sop_mc",
    "sop_nakagami",
    "sop_rayleigh",
]
