"""Secrecy outage probability of the three-node wiretap model over GK fading.

Secrecy outage occurs when ``log2(1 + g_d) - log2(1 + g_e) <= R_s``, i.e.
``g_d <= lam - 1 + lam * g_e`` with ``lam = 2**R_s``. Conditioning on the
eavesdropper SNR gives ``SOP = E[P(g_e)]`` with ``P(x) = F_d(lam - 1 + lam x)``.

The closed form replaces that expectation by its second-order moment
expansion ``P(mean) + var * P''(mean) / 2``, where ``P''`` comes from the
Meijer-G derivative identity ``z^n d^n/dz^n G^{2,1}_{1,3} = G^{2,2}_{2,4}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NonConvergenceError
from .gk_model import GkParams, db_to_linear, gk_cdf, gk_pdf, variance_factor
from .quadrature import integrate
from .specfun import COLLISION_TOL, MeijerSpec, digamma, meijer_g, regularized_lower_gamma

METHODS = (
    "approx",
    "exact-quadrature",
    "rayleigh-closed",
    "nakagami-closed",
    "asymptotic-distinct",
    "asymptotic-equal",
    "asymptotic-k1m1",
    "monte-carlo",
)


@dataclass(frozen=True)
class SecrecyScenario:
    main: GkParams
    eve: GkParams
    rs: float

    def __post_init__(self):
        if not (math.isfinite(self.rs) and self.rs > 0):
            raise DomainError(f"rs must be > 0, got {self.rs!r}")

    @property
    def lam(self) -> float:
        return 2.0**self.rs

    @property
    def threshold(self) -> float:
        """``lam - 1 + lam * mean_e``: the main-link SNR at the eavesdropper mean."""
        return self.lam - 1.0 + self.lam * self.eve.mean_snr

    def with_main_snr(self, mean_snr: float) -> "SecrecyScenario":
        return SecrecyScenario(GkParams(self.main.k, self.main.m, mean_snr), self.eve, self.rs)

    @classmethod
    def from_db(cls, kd, md, snr_d_db, ke, me, snr_e_db, rs) -> "SecrecyScenario":
        return cls(GkParams.from_db(kd, md, snr_d_db), GkParams.from_db(ke, me, snr_e_db), rs)


@dataclass(frozen=True)
class SopEstimate:
    value: float
    raw_value: float
    method: str
    sigma_e_sq: float
    validity_warning: bool
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class DiversityReport:
    analytic_order: float
    empirical_slope: float
    snr_window_db: tuple[float, float]
    log_correction_present: bool


def _eve_variance(eve: GkParams) -> float:
    shape = eve._gamma_limit_shape()
    if shape is not None:
        return eve.mean_snr**2 / shape
    return variance_factor(eve.k, eve.m) * eve.mean_snr**2


def _estimate(raw: float, method: str, sigma_e_sq: float, eve_mean: float, **extra) -> SopEstimate:
    warn = sigma_e_sq / eve_mean**2 > 1.0 or not (0.0 <= raw <= 1.0)
    return SopEstimate(min(max(raw, 0.0), 1.0), raw, method, sigma_e_sq, warn, extra)


def holtzman_expectation(p_at_mu: float, p2_at_mu: float, variance: float) -> float:
    """Second-order moment expansion ``E[P(X)] ~ P(mu) + var P''(mu) / 2``."""
    if variance < 0:
        raise DomainError("variance must be non-negative")
    if variance == 0:
        return p_at_mu
    return p_at_mu + 0.5 * variance * p2_at_mu


def p_function(s: SecrecyScenario, x: float) -> float:
    """``F_d(lam - 1 + lam x)``: outage probability given eavesdropper SNR x."""
    if x < 0:
        raise DomainError("x must be >= 0")
    return gk_cdf(s.main, s.lam - 1.0 + s.lam * x)


def p_second_derivative(s: SecrecyScenario, x: float) -> float:
    """``d^2/dx^2 F_d(lam - 1 + lam x)`` via the G^{2,2}_{2,4} derivative identity."""
    if x < 0:
        raise DomainError("x must be >= 0")
    w = s.lam - 1.0 + s.lam * x
    main = s.main
    shape = main._gamma_limit_shape()
    if shape is not None:
        spec = MeijerSpec.nakagami_derivative(shape, 2)
        z = shape * w / main.mean_snr
        log_scale = math.lgamma(shape)
    else:
        spec = MeijerSpec.gk_derivative(main.k, main.m, 2)
        z = main.k * main.m * w / main.mean_snr
        log_scale = math.lgamma(main.k) + math.lgamma(main.m)
    g, _ = meijer_g(spec, z, log_scale=log_scale)
    return s.lam**2 * g / w**2


def sop_rayleigh(gamma_d_bar: float, gamma_e_bar: float, rs: float) -> SopEstimate:
    """Closed form for Rayleigh links: ``1 - [1 + (lam ge/gd)^2 / 2] exp(-(lam-1+lam ge)/gd)``.

    The ``+`` follows from the second-order expansion with exponential
    laws (``P'' < 0``, ``var = ge^2``).
    """
    if not (gamma_d_bar > 0 and gamma_e_bar > 0 and rs > 0):
        raise DomainError("sop_rayleigh requires positive inputs")
    lam = 2.0**rs
    w = lam - 1.0 + lam * gamma_e_bar
    ratio = lam * gamma_e_bar / gamma_d_bar
    raw = 1.0 - (1.0 + 0.5 * ratio**2) * math.exp(-w / gamma_d_bar)
    return _estimate(raw, "rayleigh-closed", gamma_e_bar**2, gamma_e_bar)


def sop_nakagami(m_d: float, m_e: float, gamma_d_bar: float, gamma_e_bar: float, rs: float) -> SopEstimate:
    """Closed form for Nakagami-m links (no shadowing)."""
    if not (m_d > 0 and m_e > 0 and gamma_d_bar > 0 and gamma_e_bar > 0 and rs > 0):
        raise DomainError("sop_nakagami requires positive inputs")
    lam = 2.0**rs
    w = lam - 1.0 + lam * gamma_e_bar
    z = m_d * w / gamma_d_bar
    first = regularized_lower_gamma(m_d, z)
    g, _ = meijer_g(MeijerSpec.nakagami_derivative(m_d, 2), z, log_scale=math.lgamma(m_d))
    sigma_e_sq = gamma_e_bar**2 / m_e
    raw = first + sigma_e_sq * lam**2 * g / (2.0 * w**2)
    return _estimate(raw, "nakagami-closed", sigma_e_sq, gamma_e_bar)


def sop_approx(s: SecrecyScenario) -> SopEstimate:
    """Closed-form second-order approximation of the SOP."""
    main, eve = s.main, s.eve
    if main.effectively_rayleigh and eve.effectively_rayleigh:
        return sop_rayleigh(main.mean_snr, eve.mean_snr, s.rs)
    if main.effectively_nakagami and eve.effectively_nakagami:
        return sop_nakagami(main.m, eve.m, main.mean_snr, eve.mean_snr, s.rs)
    return sop_moment_expansion(s)


def sop_moment_expansion(s: SecrecyScenario) -> SopEstimate:
    """The generic assembly behind :func:`sop_approx`, without closed-form routing.

    Links in the no-shadowing limit still use the Gamma-law CDF and variance.
    """
    eve = s.eve
    sigma_e_sq = _eve_variance(eve)
    p0 = p_function(s, eve.mean_snr)
    p2 = p_second_derivative(s, eve.mean_snr)
    raw = holtzman_expectation(p0, p2, sigma_e_sq)
    return _estimate(raw, "approx", sigma_e_sq, eve.mean_snr, p_at_mean=p0, p2_at_mean=p2)


def sop_exact(s: SecrecyScenario, epsabs: float = 1e-6, epsrel: float = 1e-8) -> SopEstimate:
    """Quadrature of ``integral_0^inf F_d(lam - 1 + lam x) f_e(x) dx``.

    Uses ``x = mean_e * t / (1 - t)`` on ``t in (0, 1)``. The error target
    is the stricter of ``epsabs`` and ``epsrel * |SOP|``.
    """
    lam = s.lam
    scale = s.eve.mean_snr

    def integrand(t):
        x = scale * t / (1.0 - t)
        jac = scale / (1.0 - t) ** 2
        with np.errstate(under="ignore"):
            dens = gk_pdf(s.eve, x)
        out = np.zeros_like(x)
        live = dens > 0
        if np.any(live):
            out[live] = gk_cdf(s.main, lam - 1.0 + lam * x[live]) * dens[live] * jac[live]
        return out

    value, err, evals = integrate(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=epsrel)
    return _estimate(value, "exact-quadrature", _eve_variance(s.eve), s.eve.mean_snr,
                     abs_error=err, evaluations=evals)


# -- high main-SNR asymptotics ---------------------------------------------


def _is_equal_shape(main: GkParams) -> bool:
    return abs(main.k - main.m) < COLLISION_TOL


def asop_distinct(s: SecrecyScenario) -> SopEstimate:
    """Leading-order SOP as mean_d -> inf for ``k_d != m_d``; decays as mean_d^-v, v = min(k_d, m_d)."""
    main = s.main
    if _is_equal_shape(main):
        raise DomainError("k_d == m_d: use asop_equal")
    k, m = main.k, main.m
    v = min(k, m)
    w = s.threshold
    sigma_e_sq = _eve_variance(s.eve)
    log_front = (
        math.lgamma(abs(k - m)) - math.lgamma(k) - math.lgamma(m)
        + v * math.log(k * m * w / main.mean_snr)
    )
    bracket = 1.0 / v + sigma_e_sq * (v - 1.0) * s.lam**2 / (2.0 * w**2)
    raw = math.exp(log_front) * bracket
    return _estimate(raw, "asymptotic-distinct", sigma_e_sq, s.eve.mean_snr, diversity_order=v)


def asymptotic_cdf_equal(m: float, mean_snr: float, gamma: float) -> float:
    """High-mean-SNR CDF of a GK link with ``k = m``; carries a ln(mean_snr) term."""
    if not (m > 0 and mean_snr > 0 and gamma > 0):
        raise DomainError("asymptotic_cdf_equal requires positive inputs")
    lead = digamma(m + 1.0) + 2.0 * digamma(1.0) - digamma(m) - math.log(m * m * gamma / mean_snr)
    log_front = (2.0 * m - 1.0) * math.log(m) + m * math.log(gamma / mean_snr) - 2.0 * math.lgamma(m)
    return lead * math.exp(log_front)


def asop_k1m1(s: SecrecyScenario) -> SopEstimate:
    """Asymptotic SOP for a K-distributed main link (``k_d = m_d = 1``)."""
    main = s.main
    if abs(main.k - 1.0) >= COLLISION_TOL or abs(main.m - 1.0) >= COLLISION_TOL:
        raise DomainError("asop_k1m1 requires k_d = m_d = 1")
    w = s.threshold
    sigma_e_sq = _eve_variance(s.eve)
    gd = main.mean_snr
    raw = ((digamma(1.0) + digamma(2.0) - math.log(w / gd)) * w - sigma_e_sq * s.lam**2 / (2.0 * w)) / gd
    return _estimate(raw, "asymptotic-k1m1", sigma_e_sq, s.eve.mean_snr, diversity_order=1.0)


def asop_equal(s: SecrecyScenario) -> SopEstimate:
    """Asymptotic SOP for ``k_d = m_d``.

    Only ``m_d > 1`` is covered by the general expression; ``m_d = 1``
    routes to :func:`asop_k1m1` and ``0 < m_d < 1`` is rejected.
    """
    main = s.main
    if not _is_equal_shape(main):
        raise DomainError("asop_equal requires k_d == m_d")
    m = main.m
    if abs(m - 1.0) < COLLISION_TOL:
        return asop_k1m1(s)
    if m < 1.0:
        raise DomainError("asop_equal is undefined for k_d = m_d < 1")
    w = s.threshold
    gd = main.mean_snr
    sigma_e_sq = _eve_variance(s.eve)
    first = asymptotic_cdf_equal(m, gd, w)
    lead2 = digamma(m - 1.0) + 2.0 * digamma(1.0) - digamma(m) - math.log(m * m * w / gd)
    log_front2 = (
        2.0 * m * math.log(m) + (m - 2.0) * math.log(w) - m * math.log(gd)
        - math.lgamma(m) - math.lgamma(m - 1.0)
    )
    second = 0.5 * sigma_e_sq * s.lam**2 * lead2 * math.exp(log_front2)
    return _estimate(first + second, "asymptotic-equal", sigma_e_sq, s.eve.mean_snr, diversity_order=m)


def sop_asymptotic(s: SecrecyScenario) -> SopEstimate:
    """Dispatch to the asymptotic form that matches the main-link shapes."""
    if _is_equal_shape(s.main):
        return asop_equal(s)
    return asop_distinct(s)


def diversity_report(
    s: SecrecyScenario, snr_lo_db: float, snr_hi_db: float, method: str = "exact"
) -> DiversityReport:
    """Two-point log-log slope of SOP versus mean_d over ``[snr_lo_db, snr_hi_db]``.

    ``method`` is ``"exact"`` (falls back to the approximation when the
    quadrature does not converge) or ``"approx"``.
    """
    if snr_hi_db - snr_lo_db < 10.0:
        raise DomainError("diversity window must span at least 10 dB")
    if method not in ("exact", "approx"):
        raise DomainError(f"unknown method {method!r}")

    def sop(db):
        sc = s.with_main_snr(db_to_linear(db))
        if method == "exact":
            try:
                return sop_exact(sc).raw_value
            except NonConvergenceError:
                pass
        return sop_approx(sc).raw_value

    lo, hi = sop(snr_lo_db), sop(snr_hi_db)
    slope = -(math.log10(hi) - math.log10(lo)) / ((snr_hi_db - snr_lo_db) / 10.0)
    return DiversityReport(
        analytic_order=min(s.main.k, s.main.m),
        empirical_slope=slope,
        snr_window_db=(snr_lo_db, snr_hi_db),
        log_correction_present=_is_equal_shape(s.main),
    )
