"""Twisted eigenvalues of two-ball configurations, solved in closed form.

A configuration is a pair of disjoint balls with radii R+ >= R- normalized by
R+^d + R-^d = 1 (total volume delta_d), carrying the two-level weight equal
to alpha on the large ball and 1 on the small one.  The eigenfunction is
radial on each ball,

    u_pm(r) = s_pm (r^{1-d/2} J_{d/2-1}(w r) - R_pm^{1-d/2} J_{d/2-1}(w R_pm)),

and the eigenvalue lambda = w^2 is pinned by two transcendental equations in
x_- = w R-, x_+ = w R+:

    orthogonality   phi(x_-) + alpha^2 phi(x_+) = 0
    optimality      big_phi(x_-) - alpha big_phi(x_+) = 0

The first encodes the weighted-mean-zero constraint, the second equality of
the boundary gradient moduli (which characterizes the volume-optimal pair).
In the auxiliary variables M = R+^d and w, the solver runs a Newton
continuation in alpha with the analytic 2x2 Jacobian; root bracketing and
pole-adjacent work use the pole-cleared polynomial form of the orthogonality
equation.

All eigenvalues are reported in the scale-invariant normalization
|Omega|^{2/d} lambda with |Omega| = delta_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .bessel import (
    BesselDomainError,
    Dimension,
    bessel_j,
    bessel_zero,
    big_phi,
    big_phi_derivative,
    phi,
    phi_derivative,
)

__all__ = [
    "TwoBallConfig",
    "OptimalPair",
    "RadialEigenfunction",
    "BracketError",
    "ContinuationError",
    "two_ball_config",
    "orthogonality_residual",
    "optimality_residual",
    "system_jacobian",
    "solve_optimal_pair",
    "twisted_eigenvalue_fixed_m",
    "radial_eigenfunction",
    "boundary_gradient_identity",
    "pohozaev_residual",
    "curve_derivatives",
    "lower_bounds",
    "upper_bound_f",
    "mediant_value",
]

# Above this alpha the system degenerates (the orthogonality equation's pole
# pinches the root) and the symmetric closed form is returned directly.
SYMMETRIC_ALPHA = 1.0 - 1e-3

_NEWTON_TOL = 1e-12
_NEWTON_MAXIT = 50
_MIN_ALPHA_STEP = 1e-6
_QUAD_TOL = 1e-12


class BracketError(RuntimeError):
    """An iterate or query point left its admissible bracket."""


class ContinuationError(RuntimeError):
    """The alpha-continuation could not advance (step underflow)."""


# --------------------------------------------------------------------------
# configurations


@dataclass(frozen=True)
class TwoBallConfig:
    """Two disjoint balls of radii R+ >= R- with R+^d + R-^d = 1."""

    dim: Dimension
    alpha: float
    R_plus: float
    R_minus: float

    @property
    def m(self) -> float:
        """Measure ratio |B-|/|B+| in [0, 1]."""
        return (self.R_minus / self.R_plus) ** self.dim.d


def two_ball_config(dim: Dimension, alpha: float, m: float) -> TwoBallConfig:
    """Configuration with measure ratio m in (0, 1] at total volume delta_d."""
    if not 0.0 < m <= 1.0:
        raise ValueError(f"measure ratio must lie in (0, 1]: m={m}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1]: alpha={alpha}")
    d = dim.d
    R_plus = (1.0 / (1.0 + m)) ** (1.0 / d)
    R_minus = (m / (1.0 + m)) ** (1.0 / d)
    return TwoBallConfig(dim=dim, alpha=alpha, R_plus=R_plus, R_minus=R_minus)


@dataclass(frozen=True)
class OptimalPair:
    """Solution of the coupled orthogonality/optimality system at one alpha."""

    dim: Dimension
    alpha: float
    M: float
    omega: float
    m: float
    lambda_scaled: float
    s_plus: float
    s_minus: float
    residual_norm: float


# --------------------------------------------------------------------------
# residuals and Jacobian


def _split_points(dim: Dimension, M: float, omega: float):
    d = dim.d
    return omega * (1.0 - M) ** (1.0 / d), omega * M ** (1.0 / d)


def _check_bracket(dim: Dimension, x_minus: float, x_plus: float) -> None:
    hi = dim.j_upper
    if not (0.0 < x_minus < hi and 0.0 < x_plus < hi):
        raise BracketError(
            f"split points x-={x_minus}, x+={x_plus} outside (0, {hi})"
        )


def _cleared_orthogonality(dim: Dimension, alpha: float, x_minus: float, x_plus: float) -> float:
    # Orthogonality with both J_{d/2-1} denominators multiplied through:
    # pole-free, smooth across the whole bracket, and it vanishes exactly
    # where the quotient form does (away from double Dirichlet roots).
    sigma = dim.sigma
    d = dim.d
    return x_minus**d * bessel_j(sigma + 1.0, x_minus) * bessel_j(sigma - 1.0, x_plus) + (
        alpha * alpha
    ) * x_plus**d * bessel_j(sigma + 1.0, x_plus) * bessel_j(sigma - 1.0, x_minus)


def orthogonality_residual(
    dim: Dimension, alpha: float, M: float, omega: float, cleared: bool = False
) -> float:
    """Residual of the weighted-mean-zero condition at auxiliary point (M, w).

    Quotient form phi(x-) + alpha^2 phi(x+) by default; ``cleared=True``
    selects the pole-free polynomial-in-J equivalent.
    """
    x_minus, x_plus = _split_points(dim, M, omega)
    _check_bracket(dim, x_minus, x_plus)
    if cleared:
        return _cleared_orthogonality(dim, alpha, x_minus, x_plus)
    return phi(dim, x_minus) + alpha * alpha * phi(dim, x_plus)


def optimality_residual(dim: Dimension, alpha: float, M: float, omega: float) -> float:
    """Residual of the equal-boundary-gradient condition:
    big_phi(x-) - alpha big_phi(x+)."""
    x_minus, x_plus = _split_points(dim, M, omega)
    _check_bracket(dim, x_minus, x_plus)
    return big_phi(dim, x_minus) - alpha * big_phi(dim, x_plus)


def system_jacobian(dim: Dimension, alpha: float, M: float, omega: float):
    """2x2 Jacobian of (orthogonality, optimality) w.r.t. (M, omega),
    in the closed forms built from phi' and big_phi'."""
    x_minus, x_plus = _split_points(dim, M, omega)
    _check_bracket(dim, x_minus, x_plus)
    d = dim.d
    pm = phi_derivative(dim, x_minus)
    pp = phi_derivative(dim, x_plus)
    qm = big_phi_derivative(dim, x_minus)
    qp = big_phi_derivative(dim, x_plus)
    a2 = alpha * alpha
    cm = (1.0 - M) ** (1.0 / d)
    cp = M ** (1.0 / d)
    cm1 = (1.0 - M) ** (1.0 / d - 1.0)
    cp1 = M ** (1.0 / d - 1.0)
    f1_M = (omega / d) * (-cm1 * pm + a2 * cp1 * pp)
    f1_w = cm * pm + a2 * cp * pp
    f2_M = -(omega / d) * (cm1 * qm + alpha * cp1 * qp)
    f2_w = cm * qm - alpha * cp * qp
    return ((f1_M, f1_w), (f2_M, f2_w))


def _scaled_residuals(dim: Dimension, alpha: float, M: float, omega: float):
    x_minus, x_plus = _split_points(dim, M, omega)
    _check_bracket(dim, x_minus, x_plus)
    phi_m = phi(dim, x_minus)
    phi_p = phi(dim, x_plus)
    Phi_m = big_phi(dim, x_minus)
    Phi_p = big_phi(dim, x_plus)
    f1 = phi_m + alpha * alpha * phi_p
    f2 = Phi_m - alpha * Phi_p
    s1 = max(1.0, abs(phi_m) + alpha * alpha * abs(phi_p))
    s2 = max(1.0, abs(Phi_m) + alpha * abs(Phi_p))
    return f1, f2, max(abs(f1) / s1, abs(f2) / s2)


# --------------------------------------------------------------------------
# Newton corrector and alpha continuation


def _in_box(dim: Dimension, M: float, omega: float) -> bool:
    if not (0.5 < M < 1.0 - 1e-15):
        return False
    x_minus, x_plus = _split_points(dim, M, omega)
    lo, hi = dim.j_lower, dim.j_upper
    return 0.0 < x_minus < lo and lo < x_plus < hi


def _newton_correct(dim: Dimension, alpha: float, M: float, omega: float):
    """Newton on the quotient-form system; returns (M, omega, residual) or
    None on divergence (box exit or iteration cap)."""
    if not _in_box(dim, M, omega):
        return None
    for _ in range(_NEWTON_MAXIT):
        f1, f2, res = _scaled_residuals(dim, alpha, M, omega)
        if res <= _NEWTON_TOL:
            return M, omega, res
        (a, b), (c, dd) = system_jacobian(dim, alpha, M, omega)
        det = a * dd - b * c
        if det == 0.0 or not math.isfinite(det):
            return None
        dM = (-f1 * dd + f2 * b) / det
        dw = (-f2 * a + f1 * c) / det
        # damp the step until the iterate stays inside the admissible box
        t = 1.0
        for _ in range(60):
            if _in_box(dim, M + t * dM, omega + t * dw):
                break
            t *= 0.5
        else:
            return None
        M += t * dM
        omega += t * dw
    return None


def _symmetric_seed(dim: Dimension, alpha: float):
    """First-order expansion of the solution around the symmetric limit
    alpha -> 1: both split points sit at distance
    eps = (1 - alpha) big_phi(j)/(2 big_phi'(j)) from the pole j = j_(d/2-1,1),
    M = 1/2 + d eps/(2 j), and omega keeps its symmetric value to first order.
    (The analytic Jacobian itself degenerates at the symmetric point, so the
    predictor comes from this expansion rather than from the linearized
    system.)
    """
    j = dim.j_lower
    eps = (1.0 - alpha) * big_phi(dim, j) / (2.0 * big_phi_derivative(dim, j))
    M = 0.5 + dim.d * eps / (2.0 * j)
    omega = j * 2.0 ** (1.0 / dim.d)
    return M, omega


def _curve_tangent(dim: Dimension, alpha: float, M: float, omega: float):
    """(dM/dalpha, domega/dalpha) from the linearized system."""
    x_minus, x_plus = _split_points(dim, M, omega)
    (a, b), (c, dd) = system_jacobian(dim, alpha, M, omega)
    det = a * dd - b * c
    if det == 0.0 or not math.isfinite(det):
        raise BracketError("singular Jacobian on the solution curve")
    r1 = -2.0 * alpha * phi(dim, x_plus)
    r2 = big_phi(dim, x_plus)
    dM = (r1 * dd - b * r2) / det
    dw = (a * r2 - c * r1) / det
    return dM, dw


def _pair_from_point(dim: Dimension, alpha: float, M: float, omega: float, residual: float) -> OptimalPair:
    d = dim.d
    sigma = dim.sigma
    R_plus = M ** (1.0 / d)
    R_minus = (1.0 - M) ** (1.0 / d)
    s_plus = R_minus ** (sigma + 1.0) * bessel_j(sigma + 1.0, omega * R_minus)
    s_minus = alpha * R_plus ** (sigma + 1.0) * bessel_j(sigma + 1.0, omega * R_plus)
    return OptimalPair(
        dim=dim,
        alpha=alpha,
        M=M,
        omega=omega,
        m=1.0 / M - 1.0,
        lambda_scaled=dim.delta_d ** (2.0 / d) * omega * omega,
        s_plus=s_plus,
        s_minus=s_minus,
        residual_norm=residual,
    )


def solve_optimal_pair(dim: Dimension, alpha: float) -> OptimalPair:
    """Optimal two-ball pair (measure ratio m(alpha), eigenvalue
    lambda(alpha)) by Newton continuation in alpha.

    For alpha in [1 - 1e-3, 1] the degenerate symmetric closed form
    (M = 1/2, omega = j_(d/2-1,1) 2^(1/d)) is returned directly.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1]: alpha={alpha}")
    if alpha >= SYMMETRIC_ALPHA:
        omega = dim.j_lower * 2.0 ** (1.0 / dim.d)
        return _pair_from_point(dim, alpha, 0.5, omega, 0.0)

    alpha_cur = SYMMETRIC_ALPHA
    M, omega = _symmetric_seed(dim, alpha_cur)
    corrected = _newton_correct(dim, alpha_cur, M, omega)
    if corrected is None:
        raise ContinuationError("Newton failed at the continuation seed")
    M, omega, res = corrected

    while alpha_cur > alpha:
        remaining = alpha_cur - alpha
        step = remaining if remaining < 0.02 else 0.9 * remaining
        while True:
            alpha_try = alpha_cur - step
            try:
                dM, dw = _curve_tangent(dim, alpha_cur, M, omega)
                seed = (M - step * dM, omega - step * dw)
                if not _in_box(dim, *seed):
                    seed = (M, omega)
            except BracketError:
                seed = (M, omega)
            corrected = _newton_correct(dim, alpha_try, *seed)
            if corrected is not None:
                break
            step *= 0.5
            if step < _MIN_ALPHA_STEP:
                raise ContinuationError(
                    f"continuation step underflow near alpha={alpha_cur}"
                )
        alpha_cur = alpha_try
        M, omega, res = corrected

    return _pair_from_point(dim, alpha, M, omega, res)


# --------------------------------------------------------------------------
# fixed measure ratio


def _brent(f, a, b, fa, fb, xtol):
    """Brent root refinement on a sign-change bracket [a, b]."""
    if fa * fb > 0.0:
        raise BracketError("brent called without a sign change")
    c, fc = a, fa
    d = e = b - a
    while True:
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * 2.220446049250313e-16 * abs(b) + xtol
        mid = 0.5 * (c - b)
        if abs(mid) <= tol or fb == 0.0:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            d = e = mid
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * mid * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * mid * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * mid * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = mid
        a, fa = b, fb
        if abs(d) > tol:
            b += d
        else:
            b += tol if mid > 0.0 else -tol
        fb = f(b)
        if (fb > 0.0) == (fc > 0.0):
            c, fc = a, fa
            d = e = b - a


def twisted_eigenvalue_fixed_m(dim: Dimension, alpha: float, m: float):
    """Scale-invariant twisted eigenvalue of the two-ball configuration with
    measure ratio m, and the branch that attains it.

    Candidates: the smallest root of the cleared orthogonality equation with
    x+ in (j_(d/2-1,1), j_(d/2,1)) (branch ``"twisted"``), and the second
    Dirichlet eigenvalue of the large ball, whose eigenfunction has zero mean
    and is therefore always admissible (branch ``"dirichlet"``).  For m = 1
    the eigenvalue collapses to the first Dirichlet value of either ball,
    independent of alpha.
    """
    if not 0.0 < m <= 1.0:
        raise ValueError(f"measure ratio must lie in (0, 1]: m={m}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1]: alpha={alpha}")
    d = dim.d
    scale = dim.delta_d ** (2.0 / d)
    M = 1.0 / (1.0 + m)
    R_plus = M ** (1.0 / d)
    if m >= 1.0 - 1e-12:
        # the orthogonality root collapses into the window endpoint at a
        # distance O(1-m), below float resolution; the limit value is the
        # first Dirichlet eigenvalue of either (equal) ball
        return scale * (dim.j_lower / R_plus) ** 2, "dirichlet"

    dirichlet_value = scale * (dim.j_upper / R_plus) ** 2

    lo = dim.j_lower / M ** (1.0 / d)
    hi = dim.j_upper / M ** (1.0 / d)

    def cleared(w: float) -> float:
        x_minus, x_plus = _split_points(dim, M, w)
        return _cleared_orthogonality(dim, alpha, x_minus, x_plus)

    # Scan for the first sign change.  Extra points log-clustered at the left
    # edge (down to 1e-13 of the span) resolve the root that migrates into
    # the endpoint as m -> 1.
    span = hi - lo
    points = [lo + span * 10.0 ** (-13.0 + 11.0 * k / 49.0) for k in range(50)]
    points += [lo + span * (k / 399.0) for k in range(1, 400)]
    points = sorted(p for p in points if lo < p < hi)
    w_prev = points[0]
    f_prev = cleared(w_prev)
    root = None
    for w in points[1:]:
        f_val = cleared(w)
        if f_prev == 0.0:
            root = w_prev
            break
        if f_prev * f_val < 0.0:
            root = _brent(cleared, w_prev, w, f_prev, f_val, 1e-14)
            break
        w_prev, f_prev = w, f_val

    if root is None:
        return dirichlet_value, "dirichlet"
    twisted_value = scale * root * root
    if twisted_value <= dirichlet_value:
        return twisted_value, "twisted"
    return dirichlet_value, "dirichlet"


# --------------------------------------------------------------------------
# eigenfunctions and identities


@dataclass(frozen=True)
class RadialEigenfunction:
    """Closed-form twisted eigenfunction on a two-ball configuration.

    The sign convention is u = u_plus on B+ and -u_minus on B-, with both
    radial profiles positive inside their ball.  ``xi`` is the multiplier of
    the weight in the Euler-Lagrange equation, recovered from the small-ball
    side; the large-ball side carries -alpha xi.
    """

    config: TwoBallConfig
    omega: float
    s_plus: float
    s_minus: float
    xi: float

    def _radius(self, side: str) -> float:
        if side == "plus":
            return self.config.R_plus
        if side == "minus":
            return self.config.R_minus
        raise ValueError(f"side must be 'plus' or 'minus': {side}")

    def _coefficient(self, side: str) -> float:
        return self.s_plus if side == "plus" else self.s_minus

    def value(self, side: str, r: float) -> float:
        """Profile value u_side(r) for 0 <= r <= R_side."""
        R = self._radius(side)
        if not 0.0 <= r <= R:
            raise ValueError(f"radius r={r} outside [0, {R}]")
        sigma = self.config.dim.sigma
        w = self.omega
        boundary = R ** (1.0 - sigma) * bessel_j(sigma - 1.0, w * R)
        if r == 0.0:
            interior = (w / 2.0) ** (sigma - 1.0) / math.gamma(sigma)
        else:
            interior = r ** (1.0 - sigma) * bessel_j(sigma - 1.0, w * r)
        return self._coefficient(side) * (interior - boundary)

    def gradient(self, side: str, r: float) -> float:
        """Radial derivative u_side'(r) = -s w r^{1-d/2} J_{d/2}(w r)."""
        R = self._radius(side)
        if not 0.0 <= r <= R:
            raise ValueError(f"radius r={r} outside [0, {R}]")
        if r == 0.0:
            return 0.0
        sigma = self.config.dim.sigma
        w = self.omega
        return -self._coefficient(side) * w * r ** (1.0 - sigma) * bessel_j(sigma, w * r)

    def multiplier(self, side: str) -> float:
        """Constant right-hand side of this side's radial equation
        u'' + (d-1)/r u' + w^2 u = const, namely
        -s lambda R^{1-d/2} J_{d/2-1}(w R)."""
        R = self._radius(side)
        sigma = self.config.dim.sigma
        w = self.omega
        s = self._coefficient(side)
        return -s * w * w * R ** (1.0 - sigma) * bessel_j(sigma - 1.0, w * R)

    def squared_norm(self) -> float:
        """int_Omega u^2 by adaptive radial quadrature."""
        d = self.config.dim.d
        surface = d * self.config.dim.delta_d
        total = 0.0
        for side in ("plus", "minus"):
            R = self._radius(side)
            val, _ = quad(
                lambda r, s=side: self.value(s, r) ** 2 * r ** (d - 1),
                0.0,
                R,
                epsabs=_QUAD_TOL,
                epsrel=_QUAD_TOL,
            )
            total += surface * val
        return total

    def weighted_integral(self) -> float:
        """int_Omega u g for the two-level weight: alpha int u_plus on B+
        minus int u_minus on B-."""
        d = self.config.dim.d
        surface = d * self.config.dim.delta_d
        alpha = self.config.alpha
        out = 0.0
        for side, weight in (("plus", alpha), ("minus", -1.0)):
            R = self._radius(side)
            val, _ = quad(
                lambda r, s=side: self.value(s, r) * r ** (d - 1),
                0.0,
                R,
                epsabs=_QUAD_TOL,
                epsrel=_QUAD_TOL,
            )
            out += weight * surface * val
        return out


def radial_eigenfunction(pair: OptimalPair) -> RadialEigenfunction:
    """Closed-form eigenfunction attached to a solved optimal pair."""
    config = TwoBallConfig(
        dim=pair.dim,
        alpha=pair.alpha,
        R_plus=pair.M ** (1.0 / pair.dim.d),
        R_minus=(1.0 - pair.M) ** (1.0 / pair.dim.d),
    )
    sigma = pair.dim.sigma
    w = pair.omega
    xi = (
        -pair.s_minus
        * w
        * w
        * config.R_minus ** (1.0 - sigma)
        * bessel_j(sigma - 1.0, w * config.R_minus)
    )
    return RadialEigenfunction(
        config=config, omega=w, s_plus=pair.s_plus, s_minus=pair.s_minus, xi=xi
    )


def boundary_gradient_identity(pair: OptimalPair):
    """Residuals of the two boundary identities satisfied at the optimum:

    * equality of the gradient moduli on the two sphere boundaries
      (relative to their magnitude);
    * the multiplier identity |grad u|^2 = 2 lambda int u^2 / (d |Omega|)
      for the normalized eigenfunction, the squared norm coming from
      independent radial quadrature.
    """
    ef = radial_eigenfunction(pair)
    g_plus = abs(ef.gradient("plus", ef.config.R_plus))
    g_minus = abs(ef.gradient("minus", ef.config.R_minus))
    scale = max(g_plus, g_minus, 1e-300)
    residual_eq = abs(g_plus - g_minus) / scale

    norm2 = ef.squared_norm()
    lam = pair.omega**2
    volume = pair.dim.delta_d
    mu = 2.0 * lam * norm2 / (pair.dim.d * volume)
    residual_mu = abs(g_plus**2 - mu) / max(1.0, mu)
    return residual_eq, residual_mu


def pohozaev_residual(ef: RadialEigenfunction, lam: float) -> float:
    """|2 lambda - sum_sides |u'(R)|^2 d delta_d R^d| for the eigenfunction
    rescaled to unit L2 norm.

    The boundary factor uses int_{boundary B(c,R)} (X . nu) = d |B|, which is
    independent of the ball's center, so translations of the configuration
    leave the residual unchanged.
    """
    norm2 = ef.squared_norm()
    if norm2 < 1e-14:
        raise ValueError("eigenfunction squared norm below 1e-14; cannot normalize")
    d = ef.config.dim.d
    delta = ef.config.dim.delta_d
    total = 0.0
    for side in ("plus", "minus"):
        R = ef._radius(side)
        g = ef.gradient(side, R)
        total += (g * g / norm2) * d * delta * R**d
    return abs(2.0 * lam - total)


def curve_derivatives(pair: OptimalPair):
    """(dm/dalpha, dlambda/dalpha) along the optimal curve, from the
    linearized system at the solved point; both are strictly positive."""
    dM, dw = _curve_tangent(pair.dim, pair.alpha, pair.M, pair.omega)
    dm_dalpha = -dM / (pair.M * pair.M)
    dlam_dalpha = 2.0 * pair.dim.delta_d ** (2.0 / pair.dim.d) * pair.omega * dw
    return dm_dalpha, dlam_dalpha


# --------------------------------------------------------------------------
# bounds


def lower_bounds(dim: Dimension, alpha: float):
    """(m_lb, lambda_lb): the measure-ratio bound alpha^(d/(d-1)) and the
    matching volume bound (1 + alpha^(d/(d-1)))^(2/d) |B|^(2/d) lambda_1(B)."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1]: alpha={alpha}")
    d = dim.d
    m_lb = alpha ** (d / (d - 1.0))
    lam_lb = (1.0 + m_lb) ** (2.0 / d) * dim.delta_d ** (2.0 / d) * dim.j_lower**2
    return m_lb, lam_lb


def upper_bound_f(dim: Dimension, alpha: float, m: float) -> float:
    """Test-function upper bound
    f(m) = (m^(1+2/d) + alpha^2)/(m + alpha^2) (1 + 1/m)^(2/d)
           |B|^(2/d) lambda_1(B)
    for the twisted eigenvalue at measure ratio m."""
    if not 0.0 < m <= 1.0:
        raise ValueError(f"measure ratio must lie in (0, 1]: m={m}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1]: alpha={alpha}")
    d = dim.d
    a2 = alpha * alpha
    ball = dim.delta_d ** (2.0 / d) * dim.j_lower**2
    return (m ** (1.0 + 2.0 / d) + a2) / (m + a2) * (1.0 + 1.0 / m) ** (2.0 / d) * ball


def mediant_value(a1: float, a2: float, b1: float, b2: float, t: float) -> float:
    """Q(t) = (a1 t + b1)/(a2 t + b2): monotone between b1/b2 and a1/a2 for
    positive coefficients, which sandwiches the mediant (a1+b1)/(a2+b2)."""
    if min(a1, a2, b1, b2) <= 0.0:
        raise ValueError("mediant coefficients must be positive")
    if t < 0.0:
        raise ValueError(f"t must be nonnegative: {t}")
    return (a1 * t + b1) / (a2 * t + b2)
