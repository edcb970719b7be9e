"""Bessel functions of the first kind and the auxiliary ratios built on them.

Everything here is scalar, pure, and self-contained (stdlib ``math`` only).
The evaluation strategy is split by argument size:

* ascending power series for ``x <= max(30, 2 nu)``, with the alternating sum
  accumulated in double-double arithmetic so the cancellation between large
  terms does not eat into the 1e-12 relative accuracy budget;
* Hankel asymptotic expansion beyond, which for orders nu <= 8 converges to
  full double precision once ``x >= 30``.

Zeros are located by a sign-change bracket around a McMahon-expansion guess
and polished by a bisection-safeguarded Newton iteration.

The ratio functions

    phi(x)     = x^d J_{d/2+1}(x) / J_{d/2-1}(x)
    big_phi(x) = x^d J_{d/2+1}(x) / J_{d/2}(x)
    upsilon(x) = x (J_{d/2+1}/J_{d/2} + J_{d/2}/J_{d/2+1})

drive the two-ball transcendental system.  ``phi`` has a pole at the first
zero of J_{d/2-1}; callers that need values arbitrarily close to it must use
the pole-cleared polynomial form instead (see ``twoball``), so near-pole
evaluation raises :class:`PoleProximityError` rather than returning a huge
number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

__all__ = [
    "Dimension",
    "BesselDomainError",
    "PoleProximityError",
    "KernelAccuracyError",
    "bessel_j",
    "bessel_j_derivative",
    "bessel_zero",
    "phi",
    "phi_derivative",
    "big_phi",
    "big_phi_derivative",
    "upsilon",
]

# Relative floor below which a ratio denominator counts as "at a pole".
POLE_FLOOR = 1e-13

_SERIES_MAX_TERMS = 400
_ASYMPTOTIC_MAX_TERMS = 60


class BesselDomainError(ValueError):
    """Raised for arguments outside the supported domain (negative order,
    negative argument, non-finite input, or a ratio argument off its
    bracket)."""


class PoleProximityError(ArithmeticError):
    """A ratio denominator fell below the pole floor; the caller must switch
    to a pole-cleared formulation."""


class KernelAccuracyError(ArithmeticError):
    """An internal iteration (series, zero refinement) failed to converge."""


# --------------------------------------------------------------------------
# double-double helpers (error-free transformations, Dekker splitting)

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a: float, b: float):
    s = a + b
    t = s - a
    return s, (a - (s - t)) + (b - t)


def _two_prod(a: float, b: float):
    p = a * b
    ca = _SPLITTER * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLITTER * b
    bh = cb - (cb - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _dd_add(ah, al, bh, bl):
    s, e = _two_sum(ah, bh)
    e += al + bl
    return _two_sum(s, e)


def _dd_mul(ah, al, bh, bl):
    p, e = _two_prod(ah, bh)
    e += ah * bl + al * bh
    return _two_sum(p, e)


def _dd_div_scalar(ah, al, b):
    q1 = ah / b
    ph, pl = _two_prod(q1, b)
    sh, se = _two_sum(ah, -ph)
    q2 = (sh + (se + (al - pl))) / b
    return _two_sum(q1, q2)


# --------------------------------------------------------------------------
# core evaluation


def _series_j(nu: float, x: float) -> float:
    # J_nu(x) = (x/2)^nu / Gamma(nu+1) * sum_k (-(x/2)^2)^k / (k! (nu+1)_k)
    half = 0.5 * x
    qh, ql = _two_prod(half, half)
    th, tl = 1.0, 0.0
    sh, sl = 1.0, 0.0
    for k in range(1, _SERIES_MAX_TERMS):
        th, tl = _dd_mul(th, tl, -qh, -ql)
        th, tl = _dd_div_scalar(th, tl, k * (nu + k))
        sh, sl = _dd_add(sh, sl, th, tl)
        if abs(th) <= 1e-17 * abs(sh) or th == 0.0:
            break
    else:
        raise KernelAccuracyError(
            f"power series for J_{nu}({x}) did not converge in "
            f"{_SERIES_MAX_TERMS} terms"
        )
    try:
        prefactor = math.pow(half, nu) / math.gamma(nu + 1.0)
    except OverflowError:
        return 0.0  # (x/2)^nu underflows long before gamma overflows here
    return prefactor * sh + prefactor * sl


def _asymptotic_j(nu: float, x: float) -> float:
    # Hankel expansion: J_nu(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),
    # chi = x - (nu/2 + 1/4) pi.  Truncated at the smallest term.
    mu = 4.0 * nu * nu
    p_sum = 1.0
    q_sum = 0.0
    term = 1.0
    smallest = math.inf
    for k in range(1, _ASYMPTOTIC_MAX_TERMS):
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        mag = abs(term)
        if mag >= smallest:
            break  # divergent tail reached; stop at the best truncation
        smallest = mag
        quadrant = k % 4
        if quadrant == 1:
            q_sum += term
        elif quadrant == 2:
            p_sum -= term
        elif quadrant == 3:
            q_sum -= term
        else:
            p_sum += term
        if mag <= 1e-18:
            break
    chi = x - (0.5 * nu + 0.25) * math.pi
    amplitude = math.sqrt(2.0 / (math.pi * x))
    return amplitude * (p_sum * math.cos(chi) - q_sum * math.sin(chi))


def bessel_j(nu: float, x: float) -> float:
    """Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0.

    Relative accuracy is 1e-12 or better for 0 <= nu <= 8, 0 <= x <= 100
    (away from zeros of J_nu, where relative error is meaningless).
    """
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise BesselDomainError(f"non-finite input to bessel_j: nu={nu}, x={x}")
    if nu < 0.0:
        raise BesselDomainError(f"negative order not supported: nu={nu}")
    if x < 0.0:
        raise BesselDomainError(f"negative argument not supported: x={x}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if x <= max(30.0, 2.0 * nu):
        return _series_j(nu, x)
    return _asymptotic_j(nu, x)


def bessel_j_derivative(nu: float, x: float) -> float:
    """d/dx J_nu(x), via J_nu' = (nu/x) J_nu - J_{nu+1} (valid for nu >= 0)."""
    if x == 0.0:
        if nu == 0.0:
            return 0.0  # J_0' = -J_1
        if nu == 1.0:
            return 0.5
        if nu > 1.0:
            return 0.0
        return math.inf  # 0 < nu < 1: derivative blows up at the origin
    return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x)


# --------------------------------------------------------------------------
# zeros


def _mcmahon_guess(nu: float, m: int) -> float:
    beta = (m + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    b8 = 8.0 * beta
    guess = beta - (mu - 1.0) / b8
    guess -= 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8**3)
    guess -= (
        32.0
        * (mu - 1.0)
        * (83.0 * mu * mu - 982.0 * mu + 3779.0)
        / (15.0 * b8**5)
    )
    return guess


def _scan_bracket(nu: float, m: int, ceiling: float):
    # Count sign changes of J_nu walking right from just above the origin.
    # Consecutive zeros of J_nu are separated by more than 3, so a unit step
    # cannot straddle two of them.
    step = 1.0
    x = max(nu, 0.25)
    fx = bessel_j(nu, x)
    crossings = 0
    while x < ceiling:
        x_next = x + step
        f_next = bessel_j(nu, x_next)
        if fx == 0.0:
            crossings += 1
            if crossings == m:
                return x - 1e-9, x + 1e-9
        elif fx * f_next < 0.0:
            crossings += 1
            if crossings == m:
                return x, x_next
        x, fx = x_next, f_next
    raise KernelAccuracyError(
        f"could not bracket zero {m} of J_{nu} below x={ceiling}"
    )


@lru_cache(maxsize=None)
def bessel_zero(nu: float, m: int) -> float:
    """m-th positive zero j_{nu,m} of J_nu, to absolute accuracy ~1e-12."""
    if nu < 0.0 or not math.isfinite(nu):
        raise BesselDomainError(f"invalid order for bessel_zero: nu={nu}")
    if m < 1 or int(m) != m:
        raise BesselDomainError(f"zero index must be a positive integer: m={m}")
    guess = _mcmahon_guess(nu, m)
    ceiling = max(guess + 3.0, nu + 4.0 * m + 4.0)
    a, b = _scan_bracket(nu, m, ceiling)
    fa = bessel_j(nu, a)
    fb = bessel_j(nu, b)
    x = guess if a < guess < b else 0.5 * (a + b)
    for _ in range(100):
        fx = bessel_j(nu, x)
        if fx == 0.0:
            return x
        if fa * fx < 0.0:
            b, fb = x, fx
        else:
            a, fa = x, fx
        dfx = bessel_j_derivative(nu, x)
        newton_ok = dfx != 0.0
        if newton_ok:
            x_new = x - fx / dfx
            newton_ok = a < x_new < b
        if not newton_ok:
            x_new = 0.5 * (a + b)  # non-contracting Newton: bisect instead
        if abs(x_new - x) <= 1e-14 * max(1.0, abs(x_new)):
            # one last polish: terminal Newton is quadratic, so this lands
            # within a few ulp of the true zero
            dfx = bessel_j_derivative(nu, x_new)
            if dfx != 0.0:
                x_new -= bessel_j(nu, x_new) / dfx
            return x_new
        x = x_new
    raise KernelAccuracyError(
        f"zero refinement for j_({nu},{m}) did not converge"
    )


# --------------------------------------------------------------------------
# dimension bookkeeping


def _gamma_half_plus_one(d: int) -> float:
    # Gamma(d/2 + 1) without a general gamma routine: exact factorial for
    # even d, half-integer closed form Gamma(t + 1/2) = (2t)! sqrt(pi)/(4^t t!)
    # with t = (d+1)/2 for odd d.
    if d % 2 == 0:
        return float(math.factorial(d // 2))
    t = (d + 1) // 2
    return math.factorial(2 * t) * math.sqrt(math.pi) / (4.0**t * math.factorial(t))


@dataclass(frozen=True)
class Dimension:
    """Spatial dimension d >= 2 with its derived constants.

    ``delta_d`` is the volume of the unit ball in R^d and ``sigma = d/2`` is
    the Bessel order parameter of the radial reduction.
    """

    d: int
    delta_d: float = field(init=False)
    sigma: float = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise BesselDomainError(f"dimension must be an integer >= 2: {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(
            self, "delta_d", math.pi ** (self.d / 2.0) / _gamma_half_plus_one(self.d)
        )
        object.__setattr__(self, "sigma", self.d / 2.0)

    @property
    def j_lower(self) -> float:
        """First zero of J_{d/2-1} (left end of the ratio-function bracket)."""
        return bessel_zero(self.sigma - 1.0, 1)

    @property
    def j_upper(self) -> float:
        """First zero of J_{d/2} (right end of the ratio-function bracket)."""
        return bessel_zero(self.sigma, 1)


# --------------------------------------------------------------------------
# auxiliary ratio functions


def _check_ratio_domain(dim: Dimension, x: float) -> None:
    if not math.isfinite(x):
        raise BesselDomainError(f"non-finite ratio argument: {x}")
    if not 0.0 < x < dim.j_upper:
        raise BesselDomainError(
            f"ratio argument x={x} outside (0, j_(d/2,1))=(0, {dim.j_upper})"
        )


def _guarded_ratio(numerator: float, denominator: float, what: str, x: float) -> float:
    if abs(denominator) < POLE_FLOOR * (abs(numerator) + 1.0):
        raise PoleProximityError(
            f"{what} evaluated within the pole floor at x={x}; "
            "use the pole-cleared form"
        )
    return numerator / denominator


def phi(dim: Dimension, x: float) -> float:
    """x^d J_{d/2+1}(x) / J_{d/2-1}(x).

    Positive on (0, j_(d/2-1,1)), negative on (j_(d/2-1,1), j_(d/2,1)), and
    strictly increasing on each piece.
    """
    _check_ratio_domain(dim, x)
    sigma = dim.sigma
    num = x**dim.d * bessel_j(sigma + 1.0, x)
    return _guarded_ratio(num, bessel_j(sigma - 1.0, x), "phi", x)


def phi_derivative(dim: Dimension, x: float) -> float:
    """phi'(x) = 2 sigma x^(2 sigma - 1) (J_sigma / J_{sigma-1})^2 >= 0."""
    _check_ratio_domain(dim, x)
    sigma = dim.sigma
    num = bessel_j(sigma, x)
    den = bessel_j(sigma - 1.0, x)
    ratio = _guarded_ratio(num, den, "phi_derivative", x)
    return 2.0 * sigma * x ** (2.0 * sigma - 1.0) * ratio * ratio


def big_phi(dim: Dimension, x: float) -> float:
    """x^d J_{d/2+1}(x) / J_{d/2}(x): positive and strictly increasing on
    (0, j_(d/2,1))."""
    _check_ratio_domain(dim, x)
    sigma = dim.sigma
    num = x**dim.d * bessel_j(sigma + 1.0, x)
    return _guarded_ratio(num, bessel_j(sigma, x), "big_phi", x)


def big_phi_derivative(dim: Dimension, x: float) -> float:
    """Closed form big_phi' = x^(2 sigma) - big_phi/x + big_phi^2 x^(-2 sigma)."""
    value = big_phi(dim, x)
    p = x ** (2.0 * dim.sigma)
    return p - value / x + value * value / p


def upsilon(dim: Dimension, x: float) -> float:
    """x (J_{sigma+1}/J_sigma + J_sigma/J_{sigma+1}), strictly increasing on
    (0, j_(d/2,1)); tends to d + 2 as x -> 0+.

    J_{sigma+1} has no zero on the interval, so only the J_sigma denominator
    (which vanishes at the right endpoint) carries a pole guard; the second
    summand is formed as the reciprocal of the first ratio, which stays
    well-conditioned as both Bessel values shrink near the origin.
    """
    _check_ratio_domain(dim, x)
    sigma = dim.sigma
    ja = bessel_j(sigma, x)
    jb = bessel_j(sigma + 1.0, x)
    ratio = _guarded_ratio(jb, ja, "upsilon", x)
    if ratio == 0.0:
        raise PoleProximityError(f"upsilon ratio underflowed at x={x}")
    return x * (ratio + 1.0 / ratio)
