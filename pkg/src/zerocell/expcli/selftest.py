"""Named invariant checks run by the ``selftest`` command.

Each check compares a library value against an independent closed form or
a seeded simulation and raises ``AssertionError`` with a message on failure.
"""

from __future__ import annotations

import math
import time
from typing import Callable

import numpy as np

from .. import geom, hyplaw, specfun as sf, vorlaw
from ..hyplaw import HyperplaneModel
from ..sim import estimate
from ..sim.hyperplane import sample_Y_hyperplane_batch
from ..sim.voronoi import sample_Y_voronoi_batch, slivnyak_void_check
from ..vorlaw import VoronoiModel

CHECKS: dict[str, Callable[[], None]] = {}


def check(name: str):
    def register(fn):
        CHECKS[name] = fn
        return fn
    return register


def _close(a: float, b: float, rel: float, what: str):
    if not abs(a - b) <= rel * max(abs(b), 1e-300):
        raise AssertionError(f"{what}: got {a!r}, expected {b!r} (rel tol {rel:g})")


# KS critical value at the 1% level, asymptotic form
KS_C99 = 1.6276


def _ks_statistic(samples, cdf) -> float:
    x = np.sort(np.asarray(samples))
    F = np.array([cdf(v) for v in x])
    k = np.arange(1, len(x) + 1)
    return float(max(np.max(k / len(x) - F), np.max(F - (k - 1) / len(x))))


@check("specfun.kappa_table")
def _kappa():
    for n in range(1, 13):
        _close(math.exp(sf.log_kappa(n)), math.pi ** (n / 2) / math.gamma(n / 2 + 1), 1e-12, f"kappa_{n}")


@check("specfun.log_gamma_factorials")
def _log_gamma():
    for k in range(0, 21):
        _close(sf.log_gamma(k + 1.0), math.log(math.factorial(k)) if k > 1 else 0.0, 1e-12, f"ln {k}!")
    _close(sf.log_gamma(1.5), math.log(math.sqrt(math.pi) / 2), 1e-12, "ln Gamma(1.5)")


@check("specfun.inc_gamma_partition")
def _partition():
    for s in (1.0, 2.0, 10.0, 100.0, 1000.0):
        for x in (0.1 * s, s, 3.0 * s):
            lo, up = sf.inc_gamma("lower", s, x), sf.inc_gamma("upper", s, x)
            # a relative error on Gamma(s) is an absolute one on its log
            gap = sf.log_add(lo, up) - sf.log_gamma(s)
            if abs(gap) > 1e-10:
                raise AssertionError(f"partition s={s} x={x}: log gap {gap!r}")
    _close(math.exp(sf.inc_gamma("lower", 2.0, 1.0)), 1.0 - 2.0 / math.e, 1e-12, "Gamma_l(2, 1)")
    _close(math.exp(sf.inc_gamma("lower", 1.0, 2.0)), 1.0 - math.exp(-2.0), 1e-12, "Gamma_l(1, 2)")


@check("specfun.reg_inc_beta")
def _beta():
    _close(sf.reg_inc_beta(0.3, 1.0, 1.0), 0.3, 1e-12, "I_0.3(1,1)")
    _close(sf.reg_inc_beta(0.5, 0.5, 0.5), 0.5, 1e-12, "I_0.5(0.5,0.5)")
    rng = np.random.default_rng(7)
    for x, a, b in zip(rng.random(20), 0.2 + 5 * rng.random(20), 0.2 + 5 * rng.random(20)):
        y = 1.0 - x
        got = sf.reg_inc_beta(y, a, b) + sf.reg_inc_beta(1.0 - y, b, a)
        if abs(got - 1.0) > 1e-12:
            raise AssertionError(f"beta symmetry at x={x}, a={a}, b={b}: sum {got!r}")


@check("specfun.gamma_tail_asymptotic")
def _lemma_a2():
    n = 400
    up = sf.inc_gamma("upper", n + 1.0, 2.0 * n) - sf.gamma_tail_asymptotic(2.0, 2.0, n)
    lo = sf.inc_gamma("lower", n + 1.0, 0.5 * n) - sf.gamma_tail_asymptotic(0.5, 0.5, n)
    for name, v in (("c=2", up), ("c=0.5", lo)):
        if not abs(math.exp(v) - 1.0) < 0.02:
            raise AssertionError(f"asymptotic ratio {name} at n={n}: {math.exp(v)!r}")


@check("vorlaw.closed_forms")
def _vorlaw():
    m = VoronoiModel.from_lambda(2, 1.0)
    _close(vorlaw.cdf_norm(m, 1.0), 1.0 - math.exp(-math.pi), 1e-12, "n=2 cdf at 1")
    _close(vorlaw.moment(m, 2), -math.log(math.pi), 1e-12, "n=2 log E|Y|^2")
    _close(vorlaw.density(m, 1.0), -math.pi, 1e-12, "n=2 log density at 1")
    m5 = VoronoiModel.from_lambda(5, 1.0)
    h = 1e-5
    for r in (0.3, 0.7, 1.1):
        fd = (vorlaw.cdf_norm(m5, r + h) - vorlaw.cdf_norm(m5, r - h)) / (2 * h)
        exact = 5 * math.exp(sf.log_kappa(5)) * r ** 4 * math.exp(vorlaw.density(m5, r))
        _close(fd, exact, 1e-6, f"cdf derivative at r={r}")


@check("vorlaw.deviation_sandwich")
def _deviation():
    for n in (2, 5, 20):
        m = VoronoiModel.from_lambda(n, 1.0)
        s = vorlaw.sigma(m)
        for t in (0.1, 0.5, 1.0):
            tail = math.exp(vorlaw.log_sf_norm(m, (1 + t) * s))
            if tail > vorlaw.deviation_bounds(m, t, "upper"):
                raise AssertionError(f"upper deviation bound violated at n={n}, t={t}")
            if t < 1 and vorlaw.cdf_norm(m, (1 - t) * s) > vorlaw.deviation_bounds(m, t, "lower"):
                raise AssertionError(f"lower deviation bound violated at n={n}, t={t}")


@check("vorlaw.threshold_rate")
def _vor_threshold():
    n, R = 400, 0.1
    m = VoronoiModel.from_rho(n, 0.0)
    rate = vorlaw.log_cdf_norm(m, math.sqrt(n) * R) / n
    if abs(rate - vorlaw.vor_rate(R, 0.0)) > 0.02:
        raise AssertionError(f"finite-n rate {rate!r} vs limit {vorlaw.vor_rate(R, 0.0)!r}")


@check("hyplaw.intensity")
def _intensity():
    _close(hyplaw.gamma_from_lambda(2, math.log(math.pi)), math.pi, 1e-12, "n=2, lambda=pi")
    for n in (2, 10, 100):
        ll = 0.3 * n
        back = hyplaw.lambda_from_gamma(n, hyplaw.gamma_from_lambda(n, ll))
        if abs(back - ll) > 1e-12 * max(1.0, abs(ll)):
            raise AssertionError(f"lambda round trip at n={n}: {back!r} vs {ll!r}")


@check("hyplaw.kernels")
def _kernels():
    _close(hyplaw.cap_fraction(3, 0.5), 0.25, 1e-12, "3D cap at h=0.5")
    _close(hyplaw.cap_fraction(5, 0.0), 0.5, 1e-12, "hemisphere")
    for n in (2, 5, 20):
        _close(hyplaw.f_kernel(n, 1.0), 2.0, 1e-12, f"f_{n}(1)")
        _close(hyplaw.f_kernel(n, 0.0), math.exp(hyplaw.log_f0(n)), 1e-12, f"f_{n}(0)")
    m = HyperplaneModel.from_gamma(3, 1.0)
    _close(hyplaw.mean_hit_measure(m, 2.0, 1.0), 0.25, 1e-12, "mean hit measure (3, 1, 2, 1)")


@check("hyplaw.bounds")
def _hyp_bounds():
    for n in (2, 3, 10, 100):
        m = HyperplaneModel.from_log_lambda(n, 0.0)
        _close(hyplaw.tail_upper(m, 0.0), 1.0, 1e-15, f"tail bound at R=0, n={n}")
        prev = 1.0
        for R in np.linspace(0.1, 3.0, 15):
            cur = hyplaw.tail_upper(m, R)
            if cur > prev:
                raise AssertionError(f"tail bound increases at n={n}, R={R}")
            prev = cur
    m2 = HyperplaneModel.from_log_lambda(2, 0.0)
    _close(hyplaw.hyp_moment_bound(m2, 1), math.log(1.5 * math.sqrt(math.pi)), 1e-12, "moment bound n=2")


@check("hyplaw.r_lower")
def _r_lower():
    for rho in (-1.0, 0.0, 1.0):
        rep = hyplaw.rate_report(rho, 1.0)
        res = hyplaw.r_lower_equation(rho, rep.R_lower)
        if abs(res) >= 1e-12:
            raise AssertionError(f"R_lower residual {res!r} at rho={rho}")
        if not vorlaw.vor_threshold(rho) < rep.R_lower < rep.R_upper:
            raise AssertionError(f"R_lower outside its bracket at rho={rho}")
        on = hyplaw.rate_report(rho, rep.R_upper)
        if abs(on.upper_rate) > 1e-12:
            raise AssertionError(f"upper rate at R_upper is {on.upper_rate!r}")


@check("geom.chebyshev_cube")
def _cheb():
    for n in (2, 3, 5):
        cube = geom.Polytope.cube(n)
        res = geom.chebyshev_center(cube)
        if res.status != "optimal" or abs(res.inradius - 1) > 1e-12 or np.max(np.abs(res.center)) > 1e-12:
            raise AssertionError(f"cube inball in n={n}: {res}")
    v = np.array([0.3, -0.2, 0.1])
    moved = geom.chebyshev_center(geom.Polytope.cube(3).translate(v))
    if np.max(np.abs(moved.center - v)) > 1e-12 or abs(moved.inradius - 1) > 1e-12:
        raise AssertionError("inball is not translation-equivariant")


@check("geom.hit_and_run_cube")
def _har():
    rng = np.random.default_rng(11)
    pts = geom.uniform_in_polytope_batch(geom.Polytope.cube(3), np.zeros(3), rng, 3000)
    se = math.sqrt(1.0 / 3.0 / len(pts))
    if np.max(np.abs(pts.mean(axis=0))) > 4 * se:
        raise AssertionError(f"cube mean {pts.mean(axis=0)} off by more than 4 SE")
    if np.max(np.abs((pts ** 2).mean(axis=0) - 1.0 / 3.0)) > 0.03:
        raise AssertionError("cube second moment off")


@check("sim.voronoi_pipeline")
def _vor_pipeline():
    m = VoronoiModel.from_lambda(2, 1.0)
    norms, _ = sample_Y_voronoi_batch(m, 600, np.random.default_rng(3))
    d = _ks_statistic(norms, lambda r: vorlaw.cdf_norm(m, r))
    if d * math.sqrt(len(norms)) > KS_C99:
        raise AssertionError(f"KS statistic {d:.4f} above the 1% critical value")


@check("sim.hyperplane_pipeline")
def _hyp_pipeline():
    m = HyperplaneModel.from_log_lambda(3, 0.0)
    norms, _ = sample_Y_hyperplane_batch(m, 400, np.random.default_rng(5))
    for R in (0.5, 1.0, 2.0):
        est = estimate.binomial_estimate(int(np.sum(norms >= R)), len(norms), 0.95)
        if est.p_hat > hyplaw.tail_upper(m, R) + 3 * est.half_width:
            raise AssertionError(f"tail estimate {est.p_hat} exceeds the bound at R={R}")
    se = norms.std(ddof=1) / math.sqrt(len(norms))
    if norms.mean() > math.exp(hyplaw.hyp_moment_bound(m, 1)) + 3 * se:
        raise AssertionError("mean exceeds the moment bound")


@check("sim.void_probability")
def _void():
    m = VoronoiModel.from_lambda(2, 1.0)
    est = slivnyak_void_check(m, [1.0, 0.0], 3000, np.random.default_rng(13), level=0.999)
    if not est.lo <= math.exp(-math.pi) <= est.hi:
        raise AssertionError(f"void interval [{est.lo}, {est.hi}] misses exp(-pi)")


@check("sim.determinism")
def _determinism():
    def task(size, rng):
        return rng.standard_normal(size)

    a = np.concatenate(estimate.run_chunked(task, 2500, 42))
    b = np.concatenate(estimate.run_chunked(task, 2500, 42))
    if not np.array_equal(a, b):
        raise AssertionError("identical seeds gave different draws")


def run_selftest(names=None, out=print) -> bool:
    """Run the named checks (default: all); print one line each; True if all pass."""
    names = list(CHECKS) if names is None else list(names)
    ok = True
    for name in names:
        t0 = time.perf_counter()
        try:
            CHECKS[name]()
        except Exception as exc:  # each failure is reported by name
            ok = False
            out(f"FAIL {name}: {type(exc).__name__}: {exc}")
        else:
            out(f"PASS {name} ({time.perf_counter() - t0:.2f}s)")
    out("selftest: " + ("all checks passed" if ok else "FAILED"))
    return ok
