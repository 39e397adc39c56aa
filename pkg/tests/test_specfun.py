import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from gk_secrecy.errors import DomainError, LargeShapeError, UnsupportedShapeError
from gk_secrecy.specfun import (
    COLLISION_TOL,
    EULER_GAMMA,
    MeijerSpec,
    bessel_k,
    digamma,
    log_bessel_k,
    log_gamma,
    lower_incomplete_gamma,
    meijer_g,
    regularized_lower_gamma,
    regularized_upper_gamma,
)

mp.mp.dps = 40


def rel(a, b):
    return abs(a - b) / abs(b)


# -- log_gamma ----------------------------------------------------------------

def test_log_gamma_goldens():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-14)
    assert log_gamma(10.0) == pytest.approx(math.log(362880.0), rel=1e-14)


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_log_gamma_matches_mpmath(x):
    ref = float(mp.loggamma(x))
    assert abs(log_gamma(x) - ref) <= 1e-12 * max(abs(ref), 1.0)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5, math.nan])
def test_log_gamma_domain(x):
    with pytest.raises(DomainError):
        log_gamma(x)


# -- digamma ------------------------------------------------------------------

def test_digamma_goldens():
    assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-12)
    assert digamma(2.0) == pytest.approx(1.0 - 0.5772156649015329, abs=1e-12)
    assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-12)


@given(st.floats(min_value=1e-4, max_value=1e5))
def test_digamma_matches_mpmath_and_recurrence(x):
    assert abs(digamma(x) - float(mp.digamma(x))) <= 1e-10
    assert abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-10 * max(1.0, 1.0 / x)


def test_digamma_domain():
    with pytest.raises(DomainError):
        digamma(0.0)


# -- incomplete gamma ---------------------------------------------------------

@pytest.mark.parametrize("x", [0.0, 1e-8, 0.3, 1.0, 5.0, 50.0])
def test_lower_gamma_exponential_identity(x):
    assert lower_incomplete_gamma(1.0, x) == pytest.approx(-math.expm1(-x), rel=1e-12, abs=0)


def test_lower_gamma_zero_and_quadrature():
    assert lower_incomplete_gamma(2.5, 0.0) == 0.0
    ref, _ = integrate.quad(lambda t: t**1.5 * math.exp(-t), 0, 3, epsabs=0, epsrel=1e-13)
    assert abs(lower_incomplete_gamma(2.5, 3.0) - ref) <= 1e-10


@settings(max_examples=200)
@given(st.floats(min_value=0.05, max_value=60.0), st.floats(min_value=0.0, max_value=200.0))
def test_regularized_gamma_against_mpmath(a, x):
    ref = float(mp.gammainc(a, 0, x, regularized=True))
    got = regularized_lower_gamma(a, x)
    assert abs(got - ref) <= 1e-12 + 1e-10 * ref
    up = float(mp.gammainc(a, x, mp.inf, regularized=True))
    assert abs(regularized_upper_gamma(a, x) - up) <= 1e-12 + 1e-10 * up


def test_lower_gamma_monotone_and_bounded():
    for a in (0.3, 1.0, 2.5, 7.0):
        xs = np.linspace(0, 60, 200)
        vals = [lower_incomplete_gamma(a, x) for x in xs]
        assert all(b >= v for v, b in zip(vals, vals[1:]))
        assert max(vals) <= math.exp(log_gamma(a)) * (1 + 1e-14)
        assert vals[-1] == pytest.approx(math.gamma(a), rel=1e-10)


@pytest.mark.parametrize("a,x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)])
def test_lower_gamma_domain(a, x):
    with pytest.raises(DomainError):
        lower_incomplete_gamma(a, x)


# -- Bessel K -----------------------------------------------------------------

@pytest.mark.parametrize("x", [1e-6, 1e-3, 0.7, 5.0, 80.0, 700.0])
def test_bessel_half_integer(x):
    assert rel(bessel_k(0.5, x), math.sqrt(math.pi / (2 * x)) * math.exp(-x)) <= 1e-12


@pytest.mark.parametrize("nu", [0.0, 0.3, 1.5, 12.25, 50.0])
def test_bessel_even_in_order(nu):
    xs = np.array([1e-3, 0.2, 3.0, 40.0])
    assert np.array_equal(bessel_k(-nu, xs), bessel_k(nu, xs))


def test_bessel_integral_representation():
    ref, _ = integrate.quad(lambda t: math.exp(-2 * math.cosh(t)) * math.cosh(1.5 * t), 0, 20, epsabs=0, epsrel=1e-13)
    assert rel(bessel_k(1.5, 2.0), ref) <= 1e-12


@settings(max_examples=150)
@given(st.floats(min_value=-50, max_value=50), st.floats(min_value=1e-6, max_value=700))
def test_bessel_against_mpmath(nu, x):
    ref = mp.besselk(nu, x)
    if ref > mp.mpf("1e300"):
        assert log_bessel_k(nu, x) == pytest.approx(float(mp.log(ref)), rel=1e-12)
        return
    assert rel(bessel_k(nu, x), float(ref)) <= 1e-9


def test_bessel_recurrence():
    for nu in (0.25, 1.0, 2.5, 10.0, 30.0):
        for x in (1e-2, 0.5, 3.0, 30.0, 300.0):
            lhs = bessel_k(nu + 1, x)
            rhs = bessel_k(nu - 1, x) + 2 * nu / x * bessel_k(nu, x)
            assert rel(lhs, rhs) <= 1e-8


def test_bessel_range_signals():
    with pytest.raises(FloatingPointError):
        bessel_k(0.0, 800.0)
    with pytest.raises(OverflowError):
        bessel_k(50.0, 1e-8)
    with pytest.raises(DomainError):
        bessel_k(1.0, 0.0)
    # the log form stays finite where K itself does not
    assert math.isfinite(log_bessel_k(0.0, 800.0))


# -- Meijer-G -----------------------------------------------------------------

def mp_cdf_shape(k, m, z):
    return mp.meijerg([[1], []], [[k, m], [0]], z)


def mp_order2(k, m, z):
    """z^2 d^2/dz^2 of the CDF shape, via the derivative 2 z^((k+m)/2-1) K_{k-m}(2 sqrt z)."""
    with mp.workdps(50):
        g = lambda t: 2 * t ** ((mp.mpf(k) + m) / 2 - 1) * mp.besselk(mp.mpf(k) - m, 2 * mp.sqrt(t))
        return z**2 * mp.diff(g, mp.mpf(z))


def test_spec_rejects_other_shapes():
    with pytest.raises(UnsupportedShapeError):
        MeijerSpec(1, 1, 1, 2, (1.0,), (1.0, 0.0))
    with pytest.raises(UnsupportedShapeError):
        MeijerSpec(2, 1, 1, 3, (0.5,), (1.0, 2.0, 0.0))
    with pytest.raises(LargeShapeError):
        MeijerSpec.gk_cdf(250.0, 1.0)


@pytest.mark.parametrize("k,m", [(2.0, 2.5), (1.5, 1.5), (0.5, 2.5), (1.0, 1.0), (0.7, 3.1), (1.5, 1.5 + 1e-9)])
@pytest.mark.parametrize("z", [1e-8, 1e-3, 0.5, 3.0, 40.0, 1e3, 1e4])
def test_meijer_cdf_shape_against_mpmath(k, m, z):
    value, diag = meijer_g(MeijerSpec.gk_cdf(k, m), z)
    ref = float(mp_cdf_shape(k, m, z))
    assert rel(value, ref) <= 1e-8
    assert diag.estimated_abs_error >= 0
    assert diag.pole_collision == (diag.backend == "limit-log-series")


@pytest.mark.parametrize("k,m", [(2.0, 2.5), (1.5, 1.5), (0.5, 2.5), (1.0, 1.0), (3.0, 0.5)])
@pytest.mark.parametrize("z", [1e-6, 0.05, 0.8, 7.0, 60.0, 500.0])
def test_meijer_order2_against_mpmath(k, m, z):
    value, _ = meijer_g(MeijerSpec.gk_derivative(k, m, 2), z)
    ref = float(mp_order2(k, m, z))
    assert abs(value - ref) <= 1e-8 * abs(ref) + 1e-300


@pytest.mark.parametrize("m", [0.5, 1.0, 2.5, 4.0])
@pytest.mark.parametrize("z", [1e-5, 0.3, 2.0, 30.0, 300.0])
def test_meijer_nakagami_closed_form(m, z):
    value, _ = meijer_g(MeijerSpec.nakagami_derivative(m, 2), z)
    ref = float(mp.mpf(z) ** m * mp.exp(-z) * (m - 1 - z))
    assert abs(value - ref) <= 1e-8 * abs(ref)


def test_meijer_swap_symmetry():
    for z in (1e-4, 0.3, 5.0, 200.0):
        a, _ = meijer_g(MeijerSpec.gk_cdf(2.0, 2.5), z)
        b, _ = meijer_g(MeijerSpec.gk_cdf(2.5, 2.0), z)
        assert rel(a, b) <= 1e-13
        a, _ = meijer_g(MeijerSpec.gk_derivative(0.7, 1.9), z)
        b, _ = meijer_g(MeijerSpec.gk_derivative(1.9, 0.7), z)
        assert rel(a, b) <= 1e-12


def test_meijer_cdf_matches_pdf_quadrature():
    # G/(Gamma(2)Gamma(2.5)) at z = 2*2.5*g/mean against the integral of the Bessel-K density
    k, m, mean, g = 2.0, 2.5, 10.0, 10.0

    def pdf(t):
        r = k * m / mean
        return 2 * r ** ((k + m) / 2) * t ** ((k + m) / 2 - 1) * special.kv(k - m, 2 * math.sqrt(r * t)) / (
            math.gamma(k) * math.gamma(m))

    ref, _ = integrate.quad(pdf, 0, g, epsabs=1e-13)
    value, _ = meijer_g(MeijerSpec.gk_cdf(k, m), k * m * g / mean)
    assert abs(value / (math.gamma(k) * math.gamma(m)) - ref) <= 1e-6


@pytest.mark.parametrize("z", [0.05, 0.9, 6.0, 45.0])
def test_meijer_derivative_identity_finite_difference(z):
    spec = MeijerSpec.gk_cdf(2.0, 2.5)
    h = 1e-4 * z
    g = lambda x: meijer_g(spec, x)[0]
    fd = z**2 * (g(z + h) - 2 * g(z) + g(z - h)) / h**2
    value, _ = meijer_g(MeijerSpec.gk_derivative(2.0, 2.5, 2), z)
    assert rel(fd, value) <= 1e-4


def test_meijer_cdf_is_a_cdf():
    for k, m in [(2.0, 2.5), (0.5, 0.5), (1.5, 1.5)]:
        norm = math.gamma(k) * math.gamma(m)
        zs = np.logspace(-8, 4, 120)
        vals = [meijer_g(MeijerSpec.gk_cdf(k, m), z)[0] / norm for z in zs]
        assert all(0.0 <= v <= 1.0 + 1e-12 for v in vals)
        assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
        assert vals[0] < 1e-2 and vals[-1] > 1 - 1e-12


def test_meijer_backends_agree_on_grid():
    specs = [MeijerSpec.gk_cdf(2.0, 2.5), MeijerSpec.gk_cdf(1.5, 1.5), MeijerSpec.gk_cdf(0.5, 1.7),
             MeijerSpec.gk_derivative(2.0, 2.5), MeijerSpec.gk_derivative(1.0, 1.0),
             MeijerSpec.gk_derivative(1.5, 1.5), MeijerSpec.nakagami_derivative(2.5)]
    for spec in specs:
        for z in np.logspace(-8, 4, 25):
            a, da = meijer_g(spec, z, backend="series")
            b, db = meijer_g(spec, z, backend="contour")
            assert math.isfinite(b) and math.isfinite(db.estimated_abs_error)
            bound = da.estimated_abs_error + db.estimated_abs_error
            if math.isfinite(bound):
                assert abs(a - b) <= bound, (spec, z)


def test_meijer_collision_diagnostics():
    for k, m in [(1.5, 1.5), (0.5, 2.5), (1.0, 1.0)]:
        _, diag = meijer_g(MeijerSpec.gk_cdf(k, m), 0.01)
        assert diag.pole_collision and diag.backend == "limit-log-series"
    _, diag = meijer_g(MeijerSpec.gk_cdf(1.5, 2.0), 0.01)
    assert not diag.pole_collision and diag.backend == "residue-series"
    _, diag = meijer_g(MeijerSpec.gk_cdf(1.5, 2.0), 500.0)
    assert diag.backend == "contour" and not diag.pole_collision
    # a near-collision is snapped onto the log series, whose drift term enters the estimate
    v, diag = meijer_g(MeijerSpec.gk_cdf(1.5, 1.5 + COLLISION_TOL / 10), 0.01, backend="series")
    assert diag.pole_collision and diag.estimated_abs_error > 0
    assert rel(v, float(mp_cdf_shape(1.5, 1.5 + COLLISION_TOL / 10, 0.01))) <= 1e-6


def test_meijer_log_scale_extends_range():
    # Gamma(150)^2 overflows; dividing it out keeps the CDF representable
    spec = MeijerSpec.gk_cdf(150.0, 150.0)
    value, _ = meijer_g(spec, 150.0 * 150.0, log_scale=2 * math.lgamma(150.0))
    assert 0.0 < value < 1.0


def test_meijer_domain():
    with pytest.raises(DomainError):
        meijer_g(MeijerSpec.gk_cdf(1.0, 2.0), 0.0)
    with pytest.raises(DomainError):
        meijer_g(MeijerSpec.gk_cdf(1.0, 2.0), math.inf)
