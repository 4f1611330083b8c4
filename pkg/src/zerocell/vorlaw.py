"""Exact law of a uniform point in the centered Poisson-Voronoi zero cell.

The density is radial, ``f_Y(x) = lam * exp(-lam * kappa_n * |x|^n)``, so
``lam * kappa_n * |Y|^n`` is a unit exponential. Everything here is a
closed-form evaluation of that fact, carried in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import specfun as sf

LOG_2PIE = math.log(2.0 * math.pi * math.e)


@dataclass(frozen=True)
class VoronoiModel:
    """Stationary Poisson-Voronoi mosaic in dimension ``n``.

    ``log_lambda`` is the natural log of the cell intensity; ``rho`` is
    ``log_lambda / n``.
    """

    n: int
    log_lambda: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.n!r}")
        if not math.isfinite(self.log_lambda):
            raise ValueError("log_lambda must be finite")

    @property
    def rho(self) -> float:
        return self.log_lambda / self.n

    @property
    def lam(self) -> float:
        return math.exp(self.log_lambda)

    @classmethod
    def from_lambda(cls, n: int, lam: float) -> "VoronoiModel":
        if not lam > 0:
            raise ValueError("cell intensity must be positive")
        return cls(n, math.log(lam))

    @classmethod
    def from_rho(cls, n: int, rho: float, alpha: float = 0.0) -> "VoronoiModel":
        """Cell intensity ``exp(n rho) * n^(n alpha)``."""
        return cls(n, n * rho + n * alpha * math.log(n))


@dataclass(frozen=True)
class RadialLawSummary:
    sigma: float
    moments: list[tuple[float, float]] = field(default_factory=list)


def log_exponent(model: VoronoiModel, R: float) -> float:
    """``log(lam * kappa_n * R^n)``; ``-inf`` at ``R = 0``."""
    if R < 0:
        raise ValueError("radius must be nonnegative")
    if R == 0:
        return -math.inf
    return model.log_lambda + sf.log_kappa(model.n) + model.n * math.log(R)


def density(model: VoronoiModel, radius: float) -> float:
    """Log of the density of ``Y`` at any point of norm ``radius``."""
    le = log_exponent(model, radius)
    return model.log_lambda - (math.exp(le) if le < 709 else math.inf)


def cdf_norm(model: VoronoiModel, R: float) -> float:
    """``P(|Y| <= R) = 1 - exp(-lam kappa_n R^n)``."""
    le = log_exponent(model, R)
    if le == -math.inf:
        return 0.0
    if le > 709:
        return 1.0
    return -math.expm1(-math.exp(le))


def log_cdf_norm(model: VoronoiModel, R: float) -> float:
    """``log P(|Y| <= R)``, accurate deep in the lower tail."""
    le = log_exponent(model, R)
    if le == -math.inf:
        return -math.inf
    if le < -30:
        # log(1 - e^{-u}) = log u + log((1 - e^{-u}) / u), second term ~ -u/2
        u = math.exp(le)
        return le + math.log1p(-u / 2.0 + u * u / 6.0)
    if le > 709:
        return 0.0
    return math.log(-math.expm1(-math.exp(le)))


def log_sf_norm(model: VoronoiModel, R: float) -> float:
    """``log P(|Y| > R) = -lam kappa_n R^n``."""
    le = log_exponent(model, R)
    return -math.exp(le) if le < 709 else -math.inf


def moment(model: VoronoiModel, k: float) -> float:
    """``log E|Y|^k`` for real ``k >= 0``."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    n = model.n
    return sf.log_gamma(1.0 + k / n) - (k / n) * (model.log_lambda + sf.log_kappa(n))


def sigma(model: VoronoiModel) -> float:
    """``E[|Y|^2]^(1/2)``."""
    return math.exp(0.5 * moment(model, 2))


def sigma_asymptotic(model: VoronoiModel) -> float:
    """Large-``n`` equivalent ``sqrt(n) / (lam^(1/n) sqrt(2 pi e))``."""
    return math.sqrt(model.n) * math.exp(-model.rho - 0.5 * LOG_2PIE)


def summary(model: VoronoiModel, ks: Sequence[float] = (1, 2, 3, 4)) -> RadialLawSummary:
    return RadialLawSummary(sigma(model), [(k, math.exp(moment(model, k))) for k in ks])


def sample_norm(model: VoronoiModel, rng: np.random.Generator, size=None):
    """Draw ``|Y|`` by inverting the CDF: ``(E / (lam kappa_n))^(1/n)``."""
    e = rng.exponential(size=size)
    return norm_from_exponential(model, e)


def norm_from_exponential(model: VoronoiModel, e):
    scale = model.log_lambda + sf.log_kappa(model.n)
    with np.errstate(divide="ignore"):
        r = np.exp((np.log(e) - scale) / model.n)
    return float(r) if np.ndim(r) == 0 else r


def deviation_bounds(model: VoronoiModel, t: float, side: str) -> float:
    """Bounds on ``P(|Y| >= (1+t) sigma)`` (``upper``) or ``P(|Y| <= (1-t) sigma)`` (``lower``)."""
    if side == "upper":
        if not t > 0:
            raise ValueError("upper deviation bound needs t > 0")
        return math.exp(-math.exp(-1.0 + model.n * math.log1p(t)))
    if side == "lower":
        if not 0 < t < 1:
            raise ValueError("lower deviation bound needs 0 < t < 1")
        if model.n < 2:
            raise ValueError("lower deviation bound needs n >= 2")
        return math.exp(model.n * math.log1p(-t))
    raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")


def vor_rate(R: float, rho: float) -> float:
    """Exponential rate ``rho + ln(2 pi e)/2 + ln R`` at scaled radius ``R``.

    Below ``vor_threshold(rho)`` it is the small-ball rate of
    ``(1/n) ln P(|Y_n| <= sqrt(n) R)``; above it, the rate of
    ``(1/n) ln(-ln P(|Y_n| >= sqrt(n) R))``.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    return rho + 0.5 * LOG_2PIE + math.log(R)


def vor_threshold(rho: float) -> float:
    """Concentration radius ``e^-rho (2 pi e)^(-1/2)`` of ``|Y_n| / sqrt(n)``."""
    return math.exp(-rho - 0.5 * LOG_2PIE)


def thin_shell_statistic(norm_samples) -> float:
    """Empirical ``E(|Y| / E(|Y|^2)^(1/2) - 1)^2``."""
    x = np.asarray(norm_samples, dtype=float)
    if x.size == 0:
        raise ValueError("thin-shell statistic needs at least one sample")
    m2 = float(np.mean(x * x))
    if not m2 > 0:
        raise ValueError("thin-shell statistic needs a positive second moment")
    return float(np.mean((x / math.sqrt(m2) - 1.0) ** 2))
