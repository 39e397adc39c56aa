"""Gamma-family functions of a real argument."""

from __future__ import annotations

import math

from ..errors import DomainError, NonConvergenceError

EULER_GAMMA = 0.57721566490153286061

# B_2n / (2n) for n = 1..8
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)

_INCGAM_MAX_ITER = 10_000
_INCGAM_EPS = 1e-16
_TINY = 1e-300


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"log_gamma requires a finite x > 0, got {x!r}")
    return math.lgamma(x)


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function, ``x > 0``.

    Upward recurrence to x >= 10, then the Bernoulli asymptotic series.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"digamma requires a finite x > 0, got {x!r}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    power = inv2
    for coef in _DIGAMMA_ASYMPTOTIC:
        tail += coef * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def _series_p(a: float, x: float) -> float:
    # P(a, x) by the power series, used for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_INCGAM_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _INCGAM_EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise NonConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _continued_fraction_q(a: float, x: float) -> float:
    # Q(a, x) by modified Lentz on the Legendre continued fraction, x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _INCGAM_MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _INCGAM_EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise NonConvergenceError(f"incomplete gamma fraction did not converge (a={a}, x={x})")


def _check_incgam_args(a: float, x: float) -> tuple[float, float]:
    a, x = float(a), float(x)
    if not a > 0.0 or math.isinf(a):
        raise DomainError(f"incomplete gamma requires a > 0, got a={a!r}")
    if not x >= 0.0:
        raise DomainError(f"incomplete gamma requires x >= 0, got x={x!r}")
    return a, x


def regularized_lower_gamma(a: float, x: float) -> float:
    """``P(a, x) = Υ(a, x) / Γ(a)``, the Gamma(a, 1) CDF at x."""
    a, x = _check_incgam_args(a, x)
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(_series_p(a, x), 1.0)
    return max(1.0 - _continued_fraction_q(a, x), 0.0)


def regularized_upper_gamma(a: float, x: float) -> float:
    """``Q(a, x) = 1 - P(a, x)``, computed without cancellation."""
    a, x = _check_incgam_args(a, x)
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return max(1.0 - _series_p(a, x), 0.0)
    return min(_continued_fraction_q(a, x), 1.0)


def lower_incomplete_gamma(a: float, x: float) -> float:
    """``Υ(a, x) = ∫_0^x t^(a-1) e^(-t) dt``.

    Raises OverflowError once Γ(a) itself is not representable.
    """
    p = regularized_lower_gamma(a, x)
    if p == 0.0:
        return 0.0
    return math.exp(math.log(p) + math.lgamma(a))
