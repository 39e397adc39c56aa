"""Modified Bessel function of the second kind, real order.

Uses the integral representation

    K_nu(x) = 1/2 * integral_{-inf}^{inf} exp(|nu| t - x cosh t) dt

with the trapezoidal rule. The integrand is entire and decays
double-exponentially, so the rule converges geometrically in the step
size. Everything is done relative to the integrand peak, which keeps the
log-space variant finite for arguments where K itself under/overflows.
"""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, NonConvergenceError

# integrand is cut where it falls below exp(-_CUT) of its peak
_CUT = 42.0
_REL_TOL = 1e-13
_MAX_NODES = 1 << 16


def _exponent(nu, x, t):
    return nu * t - x * np.cosh(t)


def _bracket(nu: np.ndarray, x: np.ndarray, t_peak: np.ndarray, e_peak: np.ndarray, side: float) -> np.ndarray:
    # bisection for exponent(t) == e_peak - _CUT on one side of the (concave) peak
    width = 60.0 + np.maximum(0.0, np.log(100.0 / x))
    near = t_peak.copy()
    far = t_peak + side * width
    target = e_peak - _CUT
    for _ in range(100):
        mid = 0.5 * (near + far)
        above = _exponent(nu, x, mid) > target
        near = np.where(above, mid, near)
        far = np.where(above, far, mid)
    return far


def log_bessel_k(nu: float, x) -> np.ndarray | float:
    """``ln K_nu(x)`` for real ``nu`` and ``x > 0`` (scalar or array)."""
    nu = abs(float(nu))
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0.0)) or np.any(~np.isfinite(x)):
        raise DomainError("bessel_k requires finite x > 0")

    t_peak = np.arcsinh(nu / x)
    e_peak = _exponent(nu, x, t_peak)
    t_lo = _bracket(nu, x, t_peak, e_peak, -1.0)
    t_hi = _bracket(nu, x, t_peak, e_peak, +1.0)
    span = (t_hi - t_lo)[:, None]

    nodes = 64
    previous = None
    while nodes <= _MAX_NODES:
        u = np.linspace(0.0, 1.0, nodes + 1)[None, :]
        t = t_lo[:, None] + span * u
        vals = np.exp(_exponent(nu, x[:, None], t) - e_peak[:, None])
        h = span[:, 0] / nodes
        total = h * (vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1]))
        if previous is not None and np.all(np.abs(total - previous) <= _REL_TOL * total):
            out = e_peak + np.log(0.5 * total)
            return float(out[0]) if scalar else out
        previous = total
        nodes *= 2
    raise NonConvergenceError(f"bessel_k trapezoid did not converge for nu={nu}")


def bessel_k(nu: float, x) -> np.ndarray | float:
    """``K_nu(x)`` for real order ``nu`` and ``x > 0``.

    Raises OverflowError when the value exceeds the double range and
    FloatingPointError when it underflows to zero (roughly x > 700).
    """
    logk = np.asarray(log_bessel_k(nu, x))
    if np.any(logk > 709.78):
        raise OverflowError(f"K_{nu}(x) overflows double precision")
    if np.any(logk < -745.0):
        raise FloatingPointError(f"K_{nu}(x) underflows double precision")
    out = np.exp(logk)
    return float(out) if out.ndim == 0 else out

