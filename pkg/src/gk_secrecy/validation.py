"""Acceptance checks shared by ``gk-secrecy validate`` and the test suite.

Every check compares a measured quantity with a tolerance. ``scale``
multiplies every tolerance of a check, so a negative scale forces a FAIL
(used to self-test the harness).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate
from scipy import special as sp_special

from .gk_model import GkParams, gk_variance
from .montecarlo import McConfig, sop_mc
from .sop_engine import (
    SecrecyScenario,
    asop_equal,
    diversity_report,
    p_function,
    p_second_derivative,
    sop_approx,
    sop_exact,
    sop_moment_expansion,
    sop_nakagami,
    sop_rayleigh,
)
from .specfun import (
    EULER_GAMMA,
    MeijerSpec,
    bessel_k,
    digamma,
    log_gamma,
    lower_incomplete_gamma,
    meijer_g,
)


@dataclass
class CheckResult:
    name: str
    measured: str
    bound: str
    passed: bool
    seconds: float = 0.0
    details: list[str] = field(default_factory=list)


class _Conditions:
    """Collects ``value <= tol`` style conditions for one check."""

    def __init__(self, scale: float):
        self.scale = scale
        self.ok = True
        self.details: list[str] = []

    def le(self, label: str, value: float, tol: float) -> None:
        good = value <= tol * self.scale
        self.ok &= bool(good)
        self.details.append(f"{label}: {value:.4g} <= {tol * self.scale:.4g} {'ok' if good else 'FAIL'}")

    def lt(self, label: str, value: float, tol: float) -> None:
        good = value < tol * self.scale
        self.ok &= bool(good)
        self.details.append(f"{label}: {value:.4g} < {tol * self.scale:.4g} {'ok' if good else 'FAIL'}")


# -- 1 ----------------------------------------------------------------------

def check_variance(scale: float = 1.0, quick: bool = False) -> CheckResult:
    var = gk_variance(GkParams.from_db(2.0, 2.5, 15.0))
    c = _Conditions(scale)
    c.le("|var - 1100|", abs(var - 1100.0), 0.5)
    return CheckResult("variance_scalar", f"sigma_e^2={var:.6f}", f"|x-1100|<={0.5 * scale:g}", c.ok, details=c.details)


# -- 2 ----------------------------------------------------------------------

# (k_d, m_d, k_e, m_e, snr_d_db, snr_e_db); every shape in {0.5,...,2.5} occurs
# on the main link, eavesdropper shapes follow the figure settings
TRIANGLE_SCENARIOS = (
    (0.5, 1.0, 2.0, 2.5, 10, -5),
    (0.5, 2.5, 2.0, 2.5, 20, 0),
    (1.0, 1.0, 2.0, 2.0, 10, 0),
    (1.0, 2.0, 2.0, 2.0, 20, 5),
    (1.5, 2.5, 2.0, 2.5, 10, 5),
    (1.5, 1.5, 2.5, 2.5, 20, -5),
    (2.0, 2.5, 1.5, 2.5, 10, 0),
    (2.0, 0.5, 2.0, 2.0, 20, -5),
    (2.5, 2.5, 2.0, 2.5, 20, 0),
    (2.5, 1.0, 1.5, 2.5, 20, 5),
    (0.5, 0.5, 2.5, 2.5, 10, 0),
    (1.5, 2.0, 2.0, 2.0, 10, -5),
)


def check_oracle_triangle(scale: float = 1.0, quick: bool = False, samples: int = 10_000_000) -> CheckResult:
    scenarios = TRIANGLE_SCENARIOS[::4] if quick else TRIANGLE_SCENARIOS
    if quick:
        samples = min(samples, 1_000_000)
    c = _Conditions(scale)
    worst_z, worst_gap = 0.0, 0.0
    for i, (kd, md, ke, me, gd, ge) in enumerate(scenarios):
        s = SecrecyScenario.from_db(kd, md, gd, ke, me, ge, 1.0)
        exact = sop_exact(s).value
        mc = sop_mc(s, McConfig(samples, seed=1000 + i, workers=1))
        z = abs(mc.estimate - exact) / mc.stderr
        worst_z = max(worst_z, z)
        c.le(f"|mc-exact|/stderr {kd},{md}|{ke},{me} {gd}/{ge}dB", z, 4.0)
        if ge <= 0:
            gap = abs(sop_approx(s).value - exact)
            worst_gap = max(worst_gap, gap)
            c.le(f"|approx-exact| {kd},{md}|{ke},{me} {gd}/{ge}dB", gap, 0.02)
    return CheckResult(
        "oracle_triangle",
        f"max|z|={worst_z:.3f} max_gap={worst_gap:.4g}",
        f"|z|<={4 * scale:g} gap<={0.02 * scale:g}",
        c.ok,
        details=c.details,
    )


# -- 3 ----------------------------------------------------------------------

def check_tightness(scale: float = 1.0, quick: bool = False) -> CheckResult:
    errs = []
    for ge in (15.0, 5.0, 0.0, -10.0):
        s = SecrecyScenario.from_db(2.0, 2.5, 20.0, 2.0, 2.5, ge, 1.0)
        errs.append(abs(sop_approx(s).raw_value - sop_exact(s).raw_value))
    c = _Conditions(scale)
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    for (lo, hi), r in zip([(15, 5), (5, 0), (0, -10)], ratios):
        c.lt(f"err({hi}dB)/err({lo}dB)", r, 1.0)
    return CheckResult(
        "tightness_ordering",
        "errors=" + ",".join(f"{e:.3g}" for e in errs),
        f"each ratio<{scale:g}",
        c.ok,
        details=c.details,
    )


# -- 4 ----------------------------------------------------------------------

def check_diversity(scale: float = 1.0, quick: bool = False) -> CheckResult:
    c = _Conditions(scale)
    slopes = []
    for md in (0.5, 1.0, 2.0, 2.5):
        s = SecrecyScenario.from_db(1.5, md, 45.0, 1.5, 1.5, 0.0, 1.0)
        rep = diversity_report(s, 45.0, 60.0, method="approx")
        slopes.append(rep.empirical_slope)
        c.le(f"m_d={md} |slope/order-1|", abs(rep.empirical_slope / rep.analytic_order - 1.0), 0.10)
    return CheckResult(
        "diversity_order",
        "slopes=" + ",".join(f"{x:.4f}" for x in slopes),
        f"rel<={0.10 * scale:g}",
        c.ok,
        details=c.details,
    )


# -- 5 ----------------------------------------------------------------------

def check_equal_shape(scale: float = 1.0, quick: bool = False) -> CheckResult:
    def scen(db):
        return SecrecyScenario.from_db(2.0, 2.0, db, 2.0, 2.0, 5.0, 1.0)

    r40 = asop_equal(scen(40.0)).raw_value / sop_approx(scen(40.0)).raw_value
    r60 = asop_equal(scen(60.0)).raw_value / sop_approx(scen(60.0)).raw_value

    def slope(lo, hi):
        a, b = asop_equal(scen(lo)).raw_value, asop_equal(scen(hi)).raw_value
        return (math.log10(b) - math.log10(a)) / ((hi - lo) / 10.0)

    s_lo, s_hi = slope(40.0, 50.0), slope(60.0, 70.0)
    c = _Conditions(scale)
    c.le("|ln ratio(60dB)|", abs(math.log(r60)), math.log(1.25))
    c.lt("|ln ratio(60)|/|ln ratio(40)|", abs(math.log(r60)) / abs(math.log(r40)), 1.0)
    c.lt("|slope(60-70)+2|/|slope(40-50)+2|", abs(s_hi + 2.0) / abs(s_lo + 2.0), 1.0)
    return CheckResult(
        "equal_shape_asymptote",
        f"ratio40={r40:.5f} ratio60={r60:.5f} slopes={s_lo:.4f},{s_hi:.4f}",
        "ratio60 in [0.8,1.25], closer at 60, slope -> -2",
        c.ok,
        details=c.details,
    )


# -- 6 ----------------------------------------------------------------------

REDUCTION_PAIRS = ((10.0, 1.0), (100.0, 1.0), (1000.0, 10.0), (10.0, 0.1), (50.0, 5.0), (1e4, 3.0))


def check_reduction(scale: float = 1.0, quick: bool = False) -> CheckResult:
    c = _Conditions(scale)
    worst = 0.0
    for gd, ge in REDUCTION_PAIRS:
        for md, me in ((2.0, 1.5), (1.0, 1.0)):
            s = SecrecyScenario(GkParams(500.0, md, gd), GkParams(500.0, me, ge), 1.0)
            ref = sop_nakagami(md, me, gd, ge, 1.0).raw_value
            routed = sop_approx(s).raw_value
            # the generic assembly, bypassing the closed-form routing
            generic = sop_moment_expansion(s).raw_value
            for label, v in (("approx", routed), ("generic", generic)):
                rel = abs(v / ref - 1.0)
                worst = max(worst, rel)
                c.le(f"{label} vs nakagami m={md},{me} ({gd:g},{ge:g})", rel, 2e-3)
            if md == 1.0:
                ray = sop_rayleigh(gd, ge, 1.0).raw_value
                for label, v in (("approx", routed), ("generic", generic)):
                    rel = abs(v / ray - 1.0)
                    worst = max(worst, rel)
                    c.le(f"{label} vs rayleigh ({gd:g},{ge:g})", rel, 2e-3)
    return CheckResult("reduction_coherence", f"max_rel={worst:.3g}", f"<={2e-3 * scale:g}", c.ok, details=c.details)


# -- 7 ----------------------------------------------------------------------

def random_scenarios(n: int, seed: int = 20240611) -> list[SecrecyScenario]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        kd, md, ke, me = rng.uniform(0.5, 3.0, 4)
        gd, ge = rng.uniform(0.0, 25.0, 2)
        rs = rng.uniform(0.5, 2.0)
        out.append(SecrecyScenario.from_db(kd, md, gd, ke, me, ge, rs))
    return out


def check_derivative_identity(scale: float = 1.0, quick: bool = False) -> CheckResult:
    c = _Conditions(scale)
    worst = 0.0
    for s in random_scenarios(10):
        x = s.eve.mean_snr
        h = 1e-4 * (1.0 + x)
        fd = (p_function(s, x + h) - 2.0 * p_function(s, x) + p_function(s, x - h)) / h**2
        analytic = p_second_derivative(s, x)
        rel = abs(fd - analytic) / abs(analytic)
        worst = max(worst, rel)
        c.le(f"k_d={s.main.k:.3f} m_d={s.main.m:.3f} x={x:.3g}", rel, 1e-3)
    return CheckResult("derivative_identity", f"max_rel={worst:.3g}", f"<={1e-3 * scale:g}", c.ok, details=c.details)


# -- 8 ----------------------------------------------------------------------

MEIJER_GRID_SPECS = (
    MeijerSpec.gk_cdf(2.0, 2.5),
    MeijerSpec.gk_cdf(1.5, 1.5),
    MeijerSpec.gk_derivative(2.0, 2.5),
    MeijerSpec.gk_derivative(0.5, 2.5),
    MeijerSpec.nakagami_derivative(2.5),
)
MEIJER_GRID_Z = tuple(np.logspace(-8.0, 4.0, 10))


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def check_specfun(scale: float = 1.0, quick: bool = False) -> CheckResult:
    c = _Conditions(scale)
    # golden values
    c.le("log_gamma(1)", abs(log_gamma(1.0)), 1e-15)
    c.le("log_gamma(0.5)", _rel(log_gamma(0.5), 0.5 * math.log(math.pi)), 1e-12)
    c.le("log_gamma(10)", _rel(log_gamma(10.0), math.log(362880.0)), 1e-12)
    c.le("log_gamma grid", max(_rel(log_gamma(x), float(sp_special.gammaln(x)))
                               for x in np.logspace(-3, 6, 40) if abs(sp_special.gammaln(x)) > 1e-3), 1e-12)
    c.le("digamma(1)", abs(digamma(1.0) + EULER_GAMMA), 1e-10)
    c.le("digamma(2)", abs(digamma(2.0) - (1.0 - EULER_GAMMA)), 1e-10)
    c.le("digamma(0.5)", abs(digamma(0.5) - (-EULER_GAMMA - 2.0 * math.log(2.0))), 1e-10)
    c.le("digamma recurrence", max(abs(digamma(x + 1.0) - digamma(x) - 1.0 / x)
                                   for x in np.linspace(0.05, 30.0, 50)), 1e-10)
    c.le("lower_gamma(1,x)", max(_rel(lower_incomplete_gamma(1.0, x), -math.expm1(-x))
                                 for x in (1e-3, 0.5, 2.0, 10.0, 40.0)), 1e-10)
    c.le("lower_gamma(a,0)", abs(lower_incomplete_gamma(2.5, 0.0)), 0.0)
    quad = sp_integrate.quad(lambda t: t**1.5 * math.exp(-t), 0.0, 3.0, epsabs=0, epsrel=1e-13)[0]
    c.le("lower_gamma(2.5,3) vs quadrature", abs(lower_incomplete_gamma(2.5, 3.0) - quad), 1e-10)
    c.le("lower_gamma <= Gamma", max(lower_incomplete_gamma(a, x) / math.exp(log_gamma(a)) - 1.0
                                     for a in (0.3, 1.0, 2.5, 7.0) for x in (0.1, 1.0, 10.0, 100.0)), 1e-12)
    c.le("bessel_k(0.5,x)", max(_rel(bessel_k(0.5, x), math.sqrt(math.pi / (2 * x)) * math.exp(-x))
                                for x in (1e-6, 0.1, 1.0, 10.0, 300.0)), 1e-9)
    c.le("bessel_k evenness", max(_rel(bessel_k(-nu, x), bessel_k(nu, x))
                                  for nu in (0.3, 1.5, 7.0) for x in (0.01, 1.0, 50.0)), 0.0)
    quad = sp_integrate.quad(lambda t: math.exp(-2.0 * math.cosh(t)) * math.cosh(1.5 * t), 0.0, 20.0,
                             epsabs=0, epsrel=1e-13)[0]
    c.le("bessel_k(1.5,2) vs quadrature", _rel(bessel_k(1.5, 2.0), quad), 1e-9)
    rec = 0.0
    for nu in (0.25, 1.0, 2.5, 10.0, 40.0):
        for x in (1e-3, 0.5, 3.0, 30.0, 300.0):
            try:
                lhs = bessel_k(nu + 1.0, x)
                rhs = bessel_k(nu - 1.0, x) + 2.0 * nu / x * bessel_k(nu, x)
            except OverflowError:
                continue
            rec = max(rec, _rel(lhs, rhs))
    c.le("bessel_k recurrence", rec, 1e-8)
    # Meijer-G: residue series vs contour on 50 points
    worst, misses = 0.0, 0
    for spec in MEIJER_GRID_SPECS:
        for z in MEIJER_GRID_Z:
            a, da = meijer_g(spec, z, backend="series")
            b, db = meijer_g(spec, z, backend="contour")
            bound = da.estimated_abs_error + db.estimated_abs_error
            if not math.isfinite(db.estimated_abs_error):
                misses += 1
            elif math.isfinite(bound):
                if abs(a - b) > bound:
                    misses += 1
                if bound > 0:
                    worst = max(worst, abs(a - b) / bound)
    c.le("meijer series/contour disagreements (of 50)", misses, 0.5)
    return CheckResult(
        "special_functions",
        f"meijer max|diff|/bound={worst:.3g}",
        "goldens and recurrences at listed tolerances",
        c.ok,
        details=c.details,
    )


# -- 9 ----------------------------------------------------------------------

def check_mc_determinism(scale: float = 1.0, quick: bool = False) -> CheckResult:
    s = SecrecyScenario.from_db(2.0, 2.5, 15.0, 2.0, 2.5, 5.0, 1.0)
    results = [sop_mc(s, McConfig(1_000_000, seed=42, workers=w)) for w in (1, 4, 16)]
    mismatches = sum(r != results[0] for r in results[1:])
    c = _Conditions(scale)
    c.le("results differing from workers=1", mismatches, 0.5)
    return CheckResult(
        "mc_determinism",
        f"estimate={results[0].estimate!r} mismatches={mismatches}",
        "bit-identical for workers 1,4,16",
        c.ok,
        details=c.details,
    )


CHECKS: dict[str, Callable[..., CheckResult]] = {
    "variance_scalar": check_variance,
    "oracle_triangle": check_oracle_triangle,
    "tightness_ordering": check_tightness,
    "diversity_order": check_diversity,
    "equal_shape_asymptote": check_equal_shape,
    "reduction_coherence": check_reduction,
    "derivative_identity": check_derivative_identity,
    "special_functions": check_specfun,
    "mc_determinism": check_mc_determinism,
}


def run_check(name: str, quick: bool = False, bad_tolerance: bool = False) -> CheckResult:
    start = time.perf_counter()
    res = CHECKS[name](scale=-1.0 if bad_tolerance else 1.0, quick=quick)
    res.seconds = time.perf_counter() - start
    return res


def run_checks(quick: bool = False, bad_tolerance: frozenset[str] = frozenset()) -> list[CheckResult]:
    """Run every acceptance check; names in ``bad_tolerance`` get a negative tolerance."""
    unknown = set(bad_tolerance) - set(CHECKS)
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(sorted(unknown))}")
    return [run_check(name, quick, name in bad_tolerance) for name in CHECKS]


def format_result(res: CheckResult) -> str:
    return f"{'PASS' if res.passed else 'FAIL'}  {res.name:<24} {res.measured}  [bound: {res.bound}]  ({res.seconds:.1f}s)"
