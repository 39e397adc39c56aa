"""Generalized-K composite fading.

The instantaneous SNR of a GK link is ``gamma = mean_snr * X * Y / (k m)``
with independent ``X ~ Gamma(k, 1)`` (shadowing) and ``Y ~ Gamma(m, 1)``
(small-scale fading). Its density is

    f(g) = 2 (km/mean)^((k+m)/2) g^((k+m)/2 - 1) K_{k-m}(2 sqrt(k m g / mean)) / (Gamma(k) Gamma(m))

and its CDF is ``G^{2,1}_{1,3}(k m g / mean | 1; k, m, 0) / (Gamma(k) Gamma(m))``.

Shapes above ``NAKAGAMI_THRESHOLD`` are treated as the no-shadowing limit
(Nakagami-m power, i.e. a Gamma law), mirroring the parameter guard of the
Meijer-G evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .specfun import MeijerSpec, log_bessel_k, meijer_g, regularized_lower_gamma
from .specfun.meijer import MAX_PARAMETER

NAKAGAMI_THRESHOLD = MAX_PARAMETER
RAYLEIGH_TOL = 1e-12


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value)


@dataclass(frozen=True)
class GkParams:
    """One GK link: shadowing shape ``k``, fading shape ``m``, mean SNR (linear)."""

    k: float
    m: float
    mean_snr: float

    def __post_init__(self):
        for name in ("k", "m", "mean_snr"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"GkParams.{name} must be a finite positive number, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_db(cls, k: float, m: float, snr_db: float) -> "GkParams":
        return cls(k, m, db_to_linear(snr_db))

    @property
    def effectively_nakagami(self) -> bool:
        return self.k > NAKAGAMI_THRESHOLD

    @property
    def effectively_rayleigh(self) -> bool:
        return self.effectively_nakagami and abs(self.m - 1.0) < RAYLEIGH_TOL

    def _gamma_limit_shape(self) -> float | None:
        # the law is symmetric in (k, m): a huge shape on either side leaves a Gamma law
        if self.k > NAKAGAMI_THRESHOLD:
            return self.m
        if self.m > NAKAGAMI_THRESHOLD:
            return self.k
        return None


def _check_gamma(gamma, strict: bool):
    arr = np.asarray(gamma, dtype=float)
    bad = ~(arr > 0.0) if strict else ~(arr >= 0.0)
    if np.any(bad) or np.any(np.isnan(arr)):
        raise DomainError(f"SNR argument must be {'> 0' if strict else '>= 0'}, got {gamma!r}")
    return arr


def gk_pdf(p: GkParams, gamma):
    """Density of the instantaneous SNR at ``gamma > 0`` (scalar or array)."""
    arr = _check_gamma(gamma, strict=True)
    shape = p._gamma_limit_shape()
    if shape is not None:
        scale = p.mean_snr / shape
        log_f = (shape - 1.0) * np.log(arr / scale) - arr / scale - math.lgamma(shape) - math.log(scale)
    else:
        k, m = p.k, p.m
        rate = k * m / p.mean_snr
        half = 0.5 * (k + m)
        log_f = (
            math.log(2.0)
            + half * math.log(rate)
            + (half - 1.0) * np.log(arr)
            + log_bessel_k(k - m, 2.0 * np.sqrt(rate * arr))
            - math.lgamma(k)
            - math.lgamma(m)
        )
    out = np.exp(log_f)
    return float(out) if np.ndim(gamma) == 0 else out


def nakagami_cdf(m: float, mean_snr: float, gamma: float) -> float:
    """CDF of Nakagami-m fading power: ``P(m, m gamma / mean_snr)``."""
    if not (m > 0 and mean_snr > 0):
        raise DomainError("nakagami_cdf requires m > 0 and mean_snr > 0")
    return regularized_lower_gamma(m, m * gamma / mean_snr)


def _gk_cdf_scalar(p: GkParams, gamma: float) -> float:
    if gamma == 0.0:
        return 0.0
    if math.isinf(gamma):
        return 1.0
    shape = p._gamma_limit_shape()
    if shape is not None:
        return nakagami_cdf(shape, p.mean_snr, gamma)
    z = p.k * p.m * gamma / p.mean_snr
    value, _ = meijer_g(MeijerSpec.gk_cdf(p.k, p.m), z, log_scale=math.lgamma(p.k) + math.lgamma(p.m))
    return min(max(value, 0.0), 1.0)


def gk_cdf(p: GkParams, gamma):
    """CDF of the instantaneous SNR (scalar or array ``gamma >= 0``)."""
    arr = _check_gamma(gamma, strict=False)
    if arr.ndim == 0:
        return _gk_cdf_scalar(p, float(arr))
    return np.array([_gk_cdf_scalar(p, float(g)) for g in arr.ravel()]).reshape(arr.shape)


def gk_moment(p: GkParams, n: int) -> float:
    """Raw moment ``E[gamma^n] = Gamma(k+n) Gamma(m+n) / (Gamma(k) Gamma(m)) (mean/(km))^n``."""
    if n < 0 or int(n) != n:
        raise DomainError(f"moment order must be a non-negative integer, got {n!r}")
    n = int(n)
    if n == 0:
        return 1.0
    if n <= 64:
        # rising factorials divided by k^n, m^n; exact for n = 1
        growth = 1.0
        for i in range(n):
            growth *= (p.k + i) / p.k * ((p.m + i) / p.m)
        return p.mean_snr**n * growth
    log_val = (
        math.lgamma(p.k + n) - math.lgamma(p.k)
        + math.lgamma(p.m + n) - math.lgamma(p.m)
        + n * math.log(p.mean_snr / (p.k * p.m))
    )
    return math.exp(log_val)


def variance_factor(k: float, m: float) -> float:
    """``(k+1)(m+1)/(km) - 1``, the squared coefficient of variation."""
    return 1.0 / k + 1.0 / m + 1.0 / (k * m)


def gk_variance(p: GkParams) -> float:
    return variance_factor(p.k, p.m) * p.mean_snr**2
