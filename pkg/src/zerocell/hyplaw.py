"""Closed-form quantities for the stationary isotropic Poisson hyperplane mosaic.

The exact law of ``|Y|`` is not available in closed form; what is computed
here are the intensity conversion, the mean hit measure of a segment, the
exponent kernel ``f_n`` and the incomplete-gamma tail and small-ball bounds
together with their large-``n`` rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfun as sf

LOG_2PIE = math.log(2.0 * math.pi * math.e)
LOG_PIE_2 = math.log(math.pi * math.e / 2.0)
LOG_2E_PI = math.log(2.0 * math.e / math.pi)
LN2 = math.log(2.0)


class RootFindingError(ArithmeticError):
    pass


def log_f0(n: int) -> float:
    """``log(2 kappa_{n-1} / (n kappa_n))``, the minimum of ``f_n``."""
    return LN2 + sf.log_kappa(n - 1) - math.log(n) - sf.log_kappa(n)


def log_gamma_from_lambda(n: int, log_lambda: float) -> float:
    if n < 2:
        raise ValueError("hyperplane mosaics need n >= 2")
    lk = sf.log_kappa(n)
    return math.log(n) + lk - sf.log_kappa(n - 1) + (log_lambda - lk) / n


def gamma_from_lambda(n: int, log_lambda: float) -> float:
    """Hyperplane intensity for a given log cell intensity."""
    return math.exp(log_gamma_from_lambda(n, log_lambda))


def lambda_from_gamma(n: int, gamma: float) -> float:
    """Log cell intensity ``log(kappa_n (gamma kappa_{n-1} / (n kappa_n))^n)``."""
    if n < 2:
        raise ValueError("hyperplane mosaics need n >= 2")
    if not gamma > 0:
        raise ValueError("hyperplane intensity must be positive")
    lk = sf.log_kappa(n)
    return lk + n * (math.log(gamma) + sf.log_kappa(n - 1) - math.log(n) - lk)


@dataclass(frozen=True)
class HyperplaneModel:
    """Isotropic Poisson hyperplane mosaic with intensity ``gamma``.

    Build with :meth:`from_gamma`, :meth:`from_log_lambda` or :meth:`from_rho`
    so that ``gamma`` and ``log_lambda`` stay consistent.
    """

    n: int
    gamma: float
    log_lambda: float
    alpha: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"hyperplane mosaics need an integer n >= 2, got {self.n!r}")
        if not self.gamma > 0:
            raise ValueError("hyperplane intensity must be positive")
        expected = lambda_from_gamma(self.n, self.gamma)
        if abs(expected - self.log_lambda) > 1e-10 * max(1.0, abs(expected)):
            raise ValueError("gamma and log_lambda are inconsistent")

    @property
    def rho(self) -> float:
        return self.log_lambda / self.n

    @classmethod
    def from_gamma(cls, n: int, gamma: float, alpha: float = 0.0) -> "HyperplaneModel":
        return cls(n, gamma, lambda_from_gamma(n, gamma), alpha)

    @classmethod
    def from_log_lambda(cls, n: int, log_lambda: float, alpha: float = 0.0) -> "HyperplaneModel":
        gamma = gamma_from_lambda(n, log_lambda)
        return cls(n, gamma, lambda_from_gamma(n, gamma), alpha)

    @classmethod
    def from_rho(cls, n: int, rho: float, alpha: float = 0.0) -> "HyperplaneModel":
        """Cell intensity ``exp(n rho) * n^(n alpha)``."""
        return cls.from_log_lambda(n, n * rho + n * alpha * math.log(n), alpha)


def scaled_radius(n: int, R: float, alpha: float = 0.0) -> float:
    """``R n^(1/2 - alpha)``: the radius probed at scaled multiplier ``R``."""
    return R * n ** (0.5 - alpha)


def cap_fraction(n: int, h: float) -> float:
    """Normalized area of the cap ``{v in S^{n-1} : <v, e> >= h}``."""
    if n < 2:
        raise ValueError("cap fraction needs n >= 2")
    if not 0.0 <= h <= 1.0:
        raise ValueError(f"cap height must lie in [0, 1], got {h!r}")
    return 0.5 * sf.reg_inc_beta(1.0 - h * h, 0.5 * (n - 1), 0.5)


def mean_hit_measure(model: HyperplaneModel, norm_x: float, r: float) -> float:
    """Mean number of hyperplanes hitting ``[0, x]`` but missing the open ball ``B(r)``."""
    if norm_x < 0 or r < 0:
        raise ValueError("norm_x and r must be nonnegative")
    if r > norm_x or norm_x == 0:
        return 0.0
    n = model.n
    h2 = (r / norm_x) ** 2
    bracket = math.exp(log_f0(n)) * (1.0 - h2) ** (0.5 * (n - 1)) - (r / norm_x) * sf.reg_inc_beta(
        1.0 - h2, 0.5 * (n - 1), 0.5
    )
    return model.gamma * norm_x * max(bracket, 0.0)


def f_kernel(n: int, t: float) -> float:
    """Exponent kernel ``f_n(t)``; minimal at ``t = 0`` and equal to ``2t`` for ``t >= 1``."""
    if t < 0:
        raise ValueError("f_kernel defined for t >= 0")
    if t >= 1.0:
        return 2.0 * t
    return t + math.exp(log_f0(n)) * (1.0 - t * t) ** (0.5 * (n - 1)) + t * sf.reg_inc_beta(
        t * t, 0.5, 0.5 * (n - 1)
    )


def f_kernel_derivative(n: int, t: float) -> float:
    if t < 0:
        raise ValueError("f_kernel defined for t >= 0")
    if t >= 1.0:
        return 2.0
    return 1.0 + sf.reg_inc_beta(t * t, 0.5, 0.5 * (n - 1))


def _tail_argument(model: HyperplaneModel, R: float) -> float:
    # 2 gamma R kappa_{n-1} / (n kappa_n) = gamma f_n(0) R
    return model.gamma * R * math.exp(log_f0(model.n))


def log_tail_upper(model: HyperplaneModel, R: float) -> float:
    """Log of the bound ``P(|Y| >= R) <= Gamma_u(n+1, gamma f_n(0) R) / n!``."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    if R == 0:
        return 0.0
    return sf.log_reg_gamma("upper", model.n + 1, _tail_argument(model, R))


def tail_upper(model: HyperplaneModel, R: float) -> float:
    return math.exp(log_tail_upper(model, R))


def log_smallball_upper(model: HyperplaneModel, R: float) -> float:
    """Log of the small-ball bound on ``P(|Y| <= R)``; the value may exceed 1."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    n = model.n
    lk, lk1 = sf.log_kappa(n), sf.log_kappa(n - 1)
    log_pref = math.log(n) + 2 * lk - n * math.log(4.0) + math.log(n) + lk - LN2 - lk1
    const = sf.log_gamma(n) + (n + 1) * (lk1 - math.log(n) - lk)
    low = sf.inc_gamma("lower", n + 1, _tail_argument(model, R))
    return log_pref + sf.log_add(low, const)


def smallball_upper(model: HyperplaneModel, R: float) -> float:
    return math.exp(log_smallball_upper(model, R))


def log_smallball_upper_normalized(model: HyperplaneModel, R: float) -> float:
    """``log_smallball_upper + (n+1) ln 2``.

    The typical-cell representation with the simplex constant of
    :func:`log_simplex_normalization` has total mass ``2^-(n+1)``; dividing
    by it turns the small-ball bound into one that simulation respects.
    """
    return log_smallball_upper(model, R) + (model.n + 1) * LN2


def smallball_upper_normalized(model: HyperplaneModel, R: float) -> float:
    return math.exp(log_smallball_upper_normalized(model, R))


def hyp_moment_bound(model: HyperplaneModel, k: float) -> float:
    """Log of the upper bound on ``E|Y|^k``."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    n = model.n
    return (
        sf.log_gamma(n + k + 1) - sf.log_gamma(n + 1) - k * LN2
        + (k / n) * (sf.log_kappa(n) - model.log_lambda)
    )


def log_h_kernel(model: HyperplaneModel, t: float, R: float) -> float:
    """``log[Gamma_l(n+1, gamma f_n(t) R) / f_n(t)^(n+1)]``; nonincreasing in ``t``."""
    f = f_kernel(model.n, t)
    return sf.inc_gamma("lower", model.n + 1, model.gamma * f * R) - (model.n + 1) * math.log(f)


def log_simplex_normalization(n: int) -> float:
    """Log of the integral of ``simplex volume * 1{origin in hull}`` over ``n+1``
    independent uniform unit vectors."""
    lk = sf.log_kappa(n)
    return lk + math.log(n + 1) - n * LN2 + n * (sf.log_kappa(n - 1) - math.log(n) - lk)


# ---------------------------------------------------------------------------
# rates


@dataclass(frozen=True)
class RateReport:
    """Large-``n`` rates at scaled radius ``R``.

    ``upper_rate`` bounds ``limsup (1/n) ln P(|Y_n| >= sqrt(n) R)`` and is
    meaningful only when ``upper_valid``; ``smallball_rate`` bounds the
    small-ball rate and is meaningful only when ``smallball_valid``.
    """

    rho: float
    R: float
    c: float
    upper_rate: float
    smallball_rate: float
    R_lower: float
    R_upper: float
    upper_valid: bool
    smallball_valid: bool


def r_upper(rho: float) -> float:
    return math.exp(-rho) * math.sqrt(math.pi * math.e / 2.0)


def r_voronoi(rho: float) -> float:
    return math.exp(-rho - 0.5 * LOG_2PIE)


def limit_constant(rho: float, R: float) -> float:
    """``c = e^rho R sqrt(2 / (pi e))``."""
    return math.exp(rho) * R * math.sqrt(2.0 / (math.pi * math.e))


def r_lower_equation(rho: float, R: float) -> float:
    """Left side of the defining equation of ``R_lower``."""
    return rho + 0.5 * LOG_2PIE + math.log(R) - limit_constant(rho, R) - LN2


def solve_r_lower(rho: float, tol: float = 1e-15) -> float:
    lo, hi = r_voronoi(rho), r_upper(rho)
    g_lo, g_hi = r_lower_equation(rho, lo), r_lower_equation(rho, hi)
    if not (g_lo < 0.0 < g_hi):
        raise RootFindingError(f"could not bracket R_lower for rho={rho}: g({lo})={g_lo}, g({hi})={g_hi}")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if r_lower_equation(rho, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    slope_c = math.exp(rho) * math.sqrt(2.0 / (math.pi * math.e))
    for _ in range(3):
        g = r_lower_equation(rho, x)
        step = g / (1.0 / x - slope_c)
        if not lo <= x - step <= hi:
            break
        x -= step
    return x


def rate_report(rho: float, R: float) -> RateReport:
    if not R > 0:
        raise ValueError("R must be positive")
    c = limit_constant(rho, R)
    lower = solve_r_lower(rho)
    upper = r_upper(rho)
    if not lower > r_voronoi(rho):
        raise RootFindingError("R_lower does not exceed the Voronoi threshold")
    return RateReport(
        rho=rho,
        R=R,
        c=c,
        upper_rate=rho + 0.5 * LOG_2E_PI + math.log(R) - c,
        smallball_rate=rho + 0.5 * LOG_PIE_2 + math.log(R) - c,
        R_lower=lower,
        R_upper=upper,
        upper_valid=R > upper,
        smallball_valid=R < upper,
    )
