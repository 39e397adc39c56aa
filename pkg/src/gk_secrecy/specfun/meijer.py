"""Mellin-Barnes evaluation of the Meijer-G shapes used by the GK model.

Three shapes are supported, all of which reduce to

    G(z) = 1/(2 pi i) * integral_L  prod_i Gamma(beta_i + s) * R(s) * z**(-s) ds

with one or two "left" gamma factors ``beta_i`` and a rational factor
``R(s) = Gamma(-s) / Gamma(1 - order - s)``:

* ``G^{2,1}_{1,3}(z | 1; k, m, 0)``        betas (k, m),  order 0, R = -1/s
* ``G^{2,2}_{2,4}(z | 0, 1; k, m, 0, n)``  betas (k, m),  order n
* ``G^{1,2}_{2,3}(z | 0, 1; m, 0, n)``     betas (m,),    order n

For order ``n >= 1``, R is the polynomial ``prod_{i=1}^{n-1} (-s - i)``.

Two backends are provided. The residue series sums the left poles of the
gamma factors; when two pole families coincide (integer beta difference)
the double-pole residues carry ``ln z`` and digamma terms. The contour
backend integrates along a vertical line through the real saddle point of
the integrand, where the line is locally a steepest-descent path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import loggamma

from ..errors import DomainError, LargeShapeError, NonConvergenceError, UnsupportedShapeError
from .gamma import EULER_GAMMA

SHAPES = {(2, 1, 1, 3), (2, 2, 2, 4), (1, 2, 2, 3)}

COLLISION_TOL = 1e-8
MAX_PARAMETER = 200.0
SERIES_TERM_BUDGET = 10_000
CONTOUR_NODE_BUDGET = 20_000
REL_TARGET = 1e-8
REL_TARGET_COLLISION = 1e-6

_EPS = np.finfo(float).eps
_TRUNCATION = 1e-16
_CONTOUR_CUT = 40.0
# series results this accurate skip the contour cross-check
_SERIES_SHORTCUT = 1e-13

Backend = Literal["residue-series", "contour", "limit-log-series"]


@dataclass(frozen=True)
class MeijerSpec:
    """Orders and parameter vectors of a Meijer-G instance.

    Only the three shapes listed in the module docstring validate; use the
    ``gk_*`` constructors rather than building vectors by hand.
    """

    m: int
    n: int
    p: int
    q: int
    a: tuple[float, ...]
    b: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))
        _validate(self)

    @classmethod
    def gk_cdf(cls, k: float, m: float) -> "MeijerSpec":
        """``G^{2,1}_{1,3}(. | 1; k, m, 0)``."""
        return cls(2, 1, 1, 3, (1.0,), (k, m, 0.0))

    @classmethod
    def gk_derivative(cls, k: float, m: float, order: int = 2) -> "MeijerSpec":
        """``G^{2,2}_{2,4}(. | 0, 1; k, m, 0, order)``, i.e. z^n d^n/dz^n of the CDF shape."""
        return cls(2, 2, 2, 4, (0.0, 1.0), (k, m, 0.0, order))

    @classmethod
    def nakagami_derivative(cls, m: float, order: int = 2) -> "MeijerSpec":
        """``G^{1,2}_{2,3}(. | 0, 1; m, 0, order)``."""
        return cls(1, 2, 2, 3, (0.0, 1.0), (m, 0.0, order))

    @property
    def betas(self) -> tuple[float, ...]:
        return self.b[: self.m]

    @property
    def order(self) -> int:
        return 0 if self.p == 1 else int(self.b[-1])

    def swapped(self) -> "MeijerSpec":
        """Same instance with the two leading b-parameters exchanged."""
        if self.m != 2:
            return self
        b = (self.b[1], self.b[0]) + self.b[2:]
        return MeijerSpec(self.m, self.n, self.p, self.q, self.a, b)


@dataclass(frozen=True)
class EvalDiagnostics:
    terms_used: int
    estimated_abs_error: float
    backend: Backend
    pole_collision: bool


def _validate(spec: MeijerSpec) -> None:
    shape = (spec.m, spec.n, spec.p, spec.q)
    if shape not in SHAPES:
        raise UnsupportedShapeError(f"Meijer-G shape {shape} is not supported")
    if len(spec.a) != spec.p or len(spec.b) != spec.q:
        raise UnsupportedShapeError("parameter vector lengths do not match (p, q)")
    betas = spec.b[: spec.m]
    if any(not (beta > 0.0) or not math.isfinite(beta) for beta in betas):
        raise UnsupportedShapeError(f"leading b-parameters must be positive, got {betas}")
    if any(beta > MAX_PARAMETER for beta in betas):
        raise LargeShapeError(
            f"b-parameter above {MAX_PARAMETER:g} in {betas}; use the Nakagami-m limit instead"
        )
    if shape == (2, 1, 1, 3):
        if spec.a != (1.0,) or spec.b[2] != 0.0:
            raise UnsupportedShapeError("expected G^{2,1}_{1,3}(z | 1; k, m, 0)")
        return
    if spec.a != (0.0, 1.0) or spec.b[-2] != 0.0:
        raise UnsupportedShapeError(f"expected a = (0, 1) and b = (..., 0, n) for shape {shape}")
    order = spec.b[-1]
    if order < 0 or order != int(order):
        raise UnsupportedShapeError(f"derivative order must be a non-negative integer, got {order}")


# -- rational factor R(s) = Gamma(-s) / Gamma(1 - order - s) ------------------


class _Rational:
    """R(s) and R'(s) for a given derivative order."""

    def __init__(self, order: int):
        self.order = order
        if order == 0:
            self.poly = None
        else:
            # prod_{i=1}^{order-1} (-s - i)
            poly = np.polynomial.Polynomial([1.0])
            for i in range(1, order):
                poly = poly * np.polynomial.Polynomial([-float(i), -1.0])
            self.poly = poly
            self.dpoly = poly.deriv()

    def value(self, s):
        if self.poly is None:
            return -1.0 / s
        return self.poly(s)

    def deriv(self, s):
        if self.poly is None:
            return 1.0 / (s * s)
        return self.dpoly(s)

    @property
    def has_pole_at_zero(self) -> bool:
        return self.poly is None


# -- residue series ---------------------------------------------------------


def _collision(betas: tuple[float, ...]) -> int | None:
    """Integer separation of the two pole families, or None."""
    if len(betas) != 2:
        return None
    delta = abs(betas[0] - betas[1])
    nearest = round(delta)
    if abs(delta - nearest) < COLLISION_TOL:
        return int(nearest)
    return None


def _simple_family(beta: float, other: float | None, rat: _Rational, z: float, log_scale: float):
    """Sum of residues at s = -beta - j when all those poles are simple.

    Returns (sum, sum of (j+1)|term_j|, terms used); both sums already
    carry the exp(-log_scale) factor. Term j is built from j recursive
    products, so its rounding error grows roughly like j eps.
    """
    # term_j = (-1)^j / j! * Gamma(other - beta - j) * R(-beta - j) * z^(beta + j)
    log_z = math.log(z)
    log_front = beta * log_z - log_scale
    sign = 1.0
    if other is not None:
        delta = other - beta
        log_front += math.lgamma(delta)
        if delta < 0.0:
            sign = (-1.0) ** math.ceil(-delta)
    coef = sign  # (-1)^j/j! * Gamma(delta - j)/|Gamma(delta)| * z^j
    total = 0.0
    abs_total = 0.0
    prev = math.inf
    front = math.exp(log_front) if log_front < 700 else math.inf
    if front == 0.0:
        return 0.0, 0.0, 1
    if math.isinf(front):
        return math.nan, math.inf, 1
    for j in range(SERIES_TERM_BUDGET):
        term = front * coef * rat.value(-beta - j)
        total += term
        abs_total += abs(term) * (j + 1)
        mag = abs(term)
        if not math.isfinite(total) or abs_total > 1e300:
            return math.nan, math.inf, j + 1
        if j > 2 and mag <= _TRUNCATION * abs(total) and mag <= prev:
            return total, abs_total, j + 1
        if j > 2 and total == 0.0 and abs_total == 0.0:
            return total, abs_total, j + 1
        prev = mag
        coef *= -z / (j + 1)
        if other is not None:
            coef /= other - beta - j - 1
    raise NonConvergenceError("residue series exceeded its term budget")


def _double_family(beta: float, sep: int, rat: _Rational, z: float, log_scale: float):
    """Residues at s = -beta - j when the second family sits at beta + sep."""
    log_z = math.log(z)
    front = math.exp(beta * log_z - log_scale) if beta * log_z - log_scale < 700 else math.inf
    if math.isinf(front):
        return math.nan, math.inf, 1
    total = 0.0
    abs_total = 0.0
    # simple poles j < sep: (-1)^j/j! * Gamma(sep - j) * R * z^(beta+j)
    coef = float(math.factorial(sep - 1)) if sep > 0 else 0.0
    for j in range(sep):
        term = front * coef * rat.value(-beta - j)
        total += term
        abs_total += abs(term) * (j + 1)
        if j + 1 < sep:
            coef *= -z / ((j + 1) * (sep - j - 1))
    # double poles j >= sep:
    # (-1)^sep / (j! (j-sep)!) * [R' + R (psi(j+1) + psi(j-sep+1) - ln z)] * z^(beta+j)
    # coef below tracks (-1)^sep z^j / (j! (j-sep)!)
    coef = (-1.0) ** sep * z**sep / math.factorial(sep)
    psi_a = -EULER_GAMMA + sum(1.0 / i for i in range(1, sep + 1))  # psi(j+1) at j = sep
    psi_b = -EULER_GAMMA  # psi(j - sep + 1) at j = sep
    prev = math.inf
    used = sep
    for j in range(sep, sep + SERIES_TERM_BUDGET):
        s0 = -beta - j
        bracket = rat.deriv(s0) + rat.value(s0) * (psi_a + psi_b - log_z)
        term = front * coef * bracket
        total += term
        abs_total += abs(term) * (j + 1)
        used = j + 1
        if not math.isfinite(total) or abs_total > 1e300:
            return math.nan, math.inf, used
        mag = abs(term)
        if j > sep + 2 and mag <= _TRUNCATION * abs(total) and mag <= prev:
            return total, abs_total, used
        prev = mag
        coef *= z / ((j + 1) * (j + 1 - sep))
        psi_a += 1.0 / (j + 1)
        psi_b += 1.0 / (j + 1 - sep)
    raise NonConvergenceError("log residue series exceeded its term budget")


def _series(spec: MeijerSpec, z: float, log_scale: float):
    rat = _Rational(spec.order)
    betas = spec.betas
    sep = _collision(betas)
    if len(betas) == 1:
        value, mag, used = _simple_family(betas[0], None, rat, z, log_scale)
        collided = False
    elif sep is None:
        v1, m1, u1 = _simple_family(betas[0], betas[1], rat, z, log_scale)
        v2, m2, u2 = _simple_family(betas[1], betas[0], rat, z, log_scale)
        value, mag, used = v1 + v2, m1 + m2, u1 + u2
        collided = False
    else:
        low = min(betas)
        value, mag, used = _double_family(low, sep, rat, z, log_scale)
        collided = True
    err = 8.0 * _EPS * mag
    if collided:
        # betas were snapped to an exact integer separation
        drift = abs(abs(betas[0] - betas[1]) - sep)
        err += drift * mag * (4.0 + abs(math.log(z)))
    if not math.isfinite(value):
        err = math.inf
    backend: Backend = "limit-log-series" if collided else "residue-series"
    return value, EvalDiagnostics(used, err, backend, collided)


# -- contour backend --------------------------------------------------------


def _log_integrand(betas, rat: _Rational, s, log_z: float):
    s = np.asarray(s, dtype=complex)
    out = -s * log_z + np.log(rat.value(s).astype(complex))
    for beta in betas:
        out = out + loggamma(beta + s)
    return out


def _phi(betas, rat: _Rational, c: float, log_z: float) -> float:
    """Line-selection objective: log|integrand| on the real axis.

    |R| is floored at 1 so that the zeros of the polynomial factor do not
    masquerade as saddle points.
    """
    return (
        sum(math.lgamma(beta + c) for beta in betas)
        + math.log(max(abs(rat.value(c)), 1.0))
        - c * log_z
    )


def _rightmost_pole(betas, rat: _Rational) -> float:
    """Rightmost left-family pole that survives cancellation by a root of R."""
    candidates = sorted({-(beta + j) for beta in betas for j in range(rat.order + 2)}, reverse=True)
    for loc in candidates:
        mult = sum(1 for beta in betas if _is_family_member(loc, beta))
        # R has roots at s = -1 .. -(order - 1), each cancelling one gamma pole
        if abs(loc - round(loc)) < 1e-12 and 1 <= -round(loc) <= rat.order - 1:
            mult -= 1
        if mult > 0:
            return loc
    raise AssertionError("unreachable: the last candidate is never cancelled")


def _is_family_member(loc: float, beta: float) -> bool:
    j = -loc - beta
    return j > -1e-12 and abs(j - round(j)) < 1e-12


def _saddle(betas, rat, log_z: float, lo: float, hi: float) -> tuple[float, float]:
    res = minimize_scalar(
        lambda c: _phi(betas, rat, c, log_z),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-7 * max(1.0, hi - lo)},
    )
    return float(res.x), float(res.fun)


def _contour_line(betas, rat: _Rational, z: float) -> tuple[float, float, bool]:
    """Pick the vertical line: returns (c, distance to nearest pole, right_side).

    With ``right_side`` the line lies right of the s = 0 pole of the
    order-0 shape, whose residue is added back separately.
    """
    log_z = math.log(z)
    left = _rightmost_pole(betas, rat)
    hi_right = z + 2.0 * math.sqrt(z) + 50.0
    margin = 1e-6
    if rat.has_pole_at_zero:
        c_l, phi_l = _saddle(betas, rat, log_z, left + margin, -margin)
        c_r, phi_r = _saddle(betas, rat, log_z, margin, hi_right)
        # the right line adds the O(prod Gamma) residue at s = 0
        phi_r_eff = max(phi_r, sum(math.lgamma(beta) for beta in betas))
        if phi_l <= phi_r_eff:
            return c_l, min(c_l - left, -c_l), False
        return c_r, c_r, True
    c, _ = _saddle(betas, rat, log_z, left + margin, hi_right)
    return c, c - left, False


def _contour(spec: MeijerSpec, z: float, log_scale: float):
    rat = _Rational(spec.order)
    betas = spec.betas
    log_z = math.log(z)
    c, dist, right = _contour_line(betas, rat, z)
    peak = _phi(betas, rat, c, log_z)

    # truncate where the integrand drops _CONTOUR_CUT e-folds below its real-axis size
    t_max = 8.0
    while True:
        probe = c + 1j * t_max * np.array([1.0, 1.5, 2.0])
        if np.all(_log_integrand(betas, rat, probe, log_z).real < peak - _CONTOUR_CUT):
            break
        t_max *= 2.0
        if t_max > 1e6:
            raise NonConvergenceError("contour tail does not decay")

    const = 0.0
    if right:
        # moving the line right across s = 0 picks up -Res = prod Gamma(beta)
        const = math.exp(sum(math.lgamma(beta) for beta in betas) - log_scale)
    rescale = math.exp(min(peak - log_scale, 709.0))

    h = min(0.25, dist / 3.0)
    nodes = max(16, int(math.ceil(t_max / h)))
    previous = None
    while True:
        t = np.linspace(0.0, t_max, nodes + 1)
        vals = np.exp(_log_integrand(betas, rat, c + 1j * t, log_z) - peak).real
        step = t_max / nodes
        integral = step * (vals.sum() - 0.5 * (vals[0] + vals[-1])) / math.pi
        magnitude = step * np.abs(vals).sum() / math.pi
        if previous is not None:
            diff = abs(integral - previous)
            # geometric convergence: once resolved, halving h roughly squares the error
            discretisation = 10.0 * diff * diff / magnitude if diff <= 1e-3 * magnitude else diff
            err = (
                discretisation
                + 16.0 * _EPS * magnitude * math.sqrt(nodes)
                + magnitude * math.exp(-_CONTOUR_CUT)
            )
            value = integral * rescale + const
            err *= rescale
            scale = max(abs(value), magnitude * rescale + const)
            if err <= REL_TARGET * scale or 2 * nodes > CONTOUR_NODE_BUDGET:
                return value, EvalDiagnostics(nodes + 1, err, "contour", False)
        elif nodes > CONTOUR_NODE_BUDGET:
            raise NonConvergenceError("contour node budget exhausted")
        previous = integral
        nodes *= 2


def meijer_g(
    spec: MeijerSpec,
    z: float,
    backend: Literal["auto", "series", "contour"] = "auto",
    log_scale: float = 0.0,
) -> tuple[float, EvalDiagnostics]:
    """Evaluate ``G(z)`` for a supported spec and ``z > 0``.

    Returns ``(value * exp(-log_scale), diagnostics)``; ``log_scale`` lets
    callers divide out large gamma prefactors without overflow.

    ``auto`` returns the residue series when its error estimate is tiny;
    otherwise (cancellation among growing terms, z >~ 1) it also runs the
    contour and keeps whichever backend reports the smaller error.
    """
    z = float(z)
    if not z > 0.0 or not math.isfinite(z):
        raise DomainError(f"meijer_g requires a finite z > 0, got {z!r}")
    if backend == "series":
        return _series(spec, z, log_scale)
    if backend == "contour":
        return _contour(spec, z, log_scale)

    value, diag = _series(spec, z, log_scale)
    target = REL_TARGET_COLLISION if diag.pole_collision else REL_TARGET
    if math.isfinite(value) and diag.estimated_abs_error <= _SERIES_SHORTCUT * abs(value):
        return value, diag
    c_value, c_diag = _contour(spec, z, log_scale)
    # both backends ran: keep the one with the smaller error estimate
    for v, d in sorted([(value, diag), (c_value, c_diag)], key=lambda item: item[1].estimated_abs_error):
        if math.isfinite(v) and d.estimated_abs_error <= target * max(abs(v), 1e-300):
            return v, d
    # zero crossings: accept whichever backend has the smaller absolute error
    best = min([(diag.estimated_abs_error, value, diag), (c_diag.estimated_abs_error, c_value, c_diag)],
               key=lambda item: item[0])
    if math.isfinite(best[0]) and best[0] <= target * _natural_scale(spec, z, log_scale):
        return best[1], best[2]
    raise NonConvergenceError(
        f"Meijer-G {spec} at z={z:g}: series error {diag.estimated_abs_error:.3g}, "
        f"contour error {c_diag.estimated_abs_error:.3g}"
    )


def _natural_scale(spec: MeijerSpec, z: float, log_scale: float) -> float:
    rat = _Rational(spec.order)
    c, _, _ = _contour_line(spec.betas, rat, z)
    return math.exp(min(_phi(spec.betas, rat, c, math.log(z)) - log_scale, 709.0))
