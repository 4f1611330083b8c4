"""Log-space special functions.

Everything that can overflow at large dimension (ball volumes, gamma and
incomplete gamma values) is returned as a natural logarithm. ``-inf``
encodes an exact zero.
"""

from __future__ import annotations

import math
from typing import Callable

LOG_PI = math.log(math.pi)

_TINY = 1e-300
_EPS = 1e-16
_MAX_ITER = 200_000


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``."""
    if not x > 0:
        raise ValueError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def log_kappa(n: int) -> float:
    """Log volume of the unit ball in dimension ``n``."""
    if int(n) != n or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    return 0.5 * n * LOG_PI - log_gamma(0.5 * n + 1.0)


def log_omega(n: int) -> float:
    """Log surface area of the unit sphere in dimension ``n`` (``n * kappa_n``)."""
    return math.log(n) + log_kappa(n)


def log_kappa_asymptotic(n: int) -> float:
    """Stirling approximation ``(pi n)^(-1/2) (2 pi e / n)^(n/2)`` in log form."""
    return -0.5 * math.log(math.pi * n) + 0.5 * n * math.log(2.0 * math.pi * math.e / n)


def log_add(a: float, b: float) -> float:
    """``log(exp(a) + exp(b))`` without leaving log space."""
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def log_sub(a: float, b: float) -> float:
    """``log(exp(a) - exp(b))`` for ``a >= b``."""
    if b == -math.inf:
        return a
    if b > a:
        raise ValueError("log_sub would produce a negative quantity")
    if b == a:
        return -math.inf
    return a + math.log1p(-math.exp(b - a))


# ---------------------------------------------------------------------------
# regularized incomplete beta


def _beta_cf(x: float, a: float, b: float) -> float:
    # modified Lentz evaluation of the standard continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})")


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``.

    Uses the continued fraction directly for ``x < (a+1)/(a+b+2)`` and the
    reflection ``I_x(a,b) = 1 - I_{1-x}(b,a)`` otherwise.
    """
    if not (a > 0 and b > 0):
        raise ValueError(f"reg_inc_beta requires a, b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"reg_inc_beta requires 0 <= x <= 1, got {x!r}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        val = math.exp(log_front) * _beta_cf(x, a, b) / a
    else:
        val = 1.0 - math.exp(log_front) * _beta_cf(1.0 - x, b, a) / b
    return min(1.0, max(0.0, val))


# ---------------------------------------------------------------------------
# incomplete gamma


def _log_lower_series(s: float, x: float) -> float:
    # Gamma_l(s, x) = e^{-x} x^s sum_k x^k / (s (s+1) ... (s+k))
    term = 1.0 / s
    total = term
    ap = s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if term < total * _EPS:
            return -x + s * math.log(x) + math.log(total)
    raise ArithmeticError(f"incomplete gamma series did not converge (s={s}, x={x})")


def _log_upper_cf(s: float, x: float) -> float:
    # Gamma_u(s, x) = e^{-x} x^s / (x + 1 - s - 1(1-s)/(x + 3 - s - ...)), Lentz
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
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
        if abs(delta - 1.0) < _EPS:
            return -x + s * math.log(x) + math.log(h)
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (s={s}, x={x})")


def inc_gamma(kind: str, s: float, x: float) -> float:
    """Log of the lower (``kind="lower"``) or upper incomplete gamma function.

    ``Gamma_l(s, x) = int_0^x t^(s-1) e^-t dt`` and
    ``Gamma_u(s, x) = int_x^inf t^(s-1) e^-t dt``. The series is used for
    ``x < s + 1`` and the continued fraction beyond; the other function is
    obtained as a log-space complement of ``log_gamma(s)``.
    """
    if kind not in ("lower", "upper"):
        raise ValueError(f"kind must be 'lower' or 'upper', got {kind!r}")
    if not s > 0:
        raise ValueError(f"inc_gamma requires s > 0, got {s!r}")
    if not x >= 0:
        raise ValueError(f"inc_gamma requires x >= 0, got {x!r}")
    lg = math.lgamma(s)
    if x == 0.0:
        return -math.inf if kind == "lower" else lg
    if math.isinf(x):
        return lg if kind == "lower" else -math.inf
    if x < s + 1.0:
        low = _log_lower_series(s, x)
        if kind == "lower":
            return min(low, lg)
        return log_sub(lg, min(low, lg))
    up = _log_upper_cf(s, x)
    if kind == "upper":
        return min(up, lg)
    return log_sub(lg, min(up, lg))


def log_reg_gamma(kind: str, s: float, x: float) -> float:
    """``inc_gamma(kind, s, x) - log_gamma(s)``: log of the regularized value."""
    return inc_gamma(kind, s, x) - math.lgamma(s)


# ---------------------------------------------------------------------------
# endpoint Laplace asymptotics


def laplace_edge(
    f: Callable[[float], float],
    df: Callable[[float], float],
    endpoint: float,
    a_n: float,
    n: int,
    side: str = "left",
) -> float:
    """Log of the endpoint Laplace approximation of ``int e^{-n f}``.

    For ``side="left"`` the integral runs from ``a_n`` to the right of a
    minimum at ``endpoint`` and is approximated by
    ``exp(-n f(a_n)) / (n f'(endpoint))``; ``f'(endpoint)`` must be positive.
    For ``side="right"`` the integral ends at ``a_n`` near a minimum at the
    right endpoint, the approximation is ``-exp(-n f(a_n)) / (n f'(endpoint))``
    and ``f'(endpoint)`` must be negative.
    """
    slope = df(endpoint)
    if side == "left":
        if not slope > 0:
            raise ValueError(f"left-edge Laplace approximation needs f'(a) > 0, got {slope!r}")
        return -n * f(a_n) - math.log(n * slope)
    if side == "right":
        if not slope < 0:
            raise ValueError(f"right-edge Laplace approximation needs f'(b) < 0, got {slope!r}")
        return -n * f(a_n) - math.log(-n * slope)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def gamma_tail_asymptotic(c_n: float, c: float, n: int) -> float:
    """Log of the Laplace-method approximation to ``Gamma_u(n+1, c_n n)`` or
    ``Gamma_l(n+1, c_n n)``.

    With ``c`` the limit of ``c_n``: for ``c > 1`` this approximates the upper
    function by ``n^n c e^{n(ln c_n - c_n)} / (c - 1)``; for ``c < 1`` the
    lower function by the same expression with ``1 - c`` in the denominator.
    """
    if not c_n > 0 or not c > 0:
        raise ValueError("c_n and c must be positive")
    if c == 1.0:
        raise ValueError("the approximation is undefined at c = 1")
    return n * math.log(n) + math.log(c) + n * (math.log(c_n) - c_n) - math.log(abs(c - 1.0))
