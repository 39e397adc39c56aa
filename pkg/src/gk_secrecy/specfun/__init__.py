"""Real-valued special functions needed by the GK secrecy analysis."""

from .bessel import bessel_k, log_bessel_k
from .gamma import (
    EULER_GAMMA,
    digamma,
    log_gamma,
    lower_incomplete_gamma,
    regularized_lower_gamma,
    regularized_upper_gamma,
)
from .meijer import COLLISION_TOL, EvalDiagnostics, MeijerSpec, meijer_g

__all__ = [
    "COLLISION_TOL",
    "EULER_GAMMA",
    "EvalDiagnostics",
    "MeijerSpec",
    "bessel_k",
    "digamma",
    "log_bessel_k",
    "log_gamma",
    "lower_incomplete_gamma",
    "meijer_g",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
]
