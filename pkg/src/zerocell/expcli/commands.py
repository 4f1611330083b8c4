"""Experiment commands. Each returns the text it would write, so the CLI
layer only handles files and exit codes."""

from __future__ import annotations

import functools
import json
import math
import time

import numpy as np

from .. import __version__, hyplaw, vorlaw
from ..hyplaw import HyperplaneModel
from ..sim import estimate
from ..sim.hyperplane import WindowTooSmallError, sample_Y_hyperplane_batch
from ..sim.voronoi import sample_Y_voronoi_batch
from ..vorlaw import VoronoiModel
from .config import ConfigError, ExperimentConfig
from .output import sweep_svgs, write_csv


MAX_REJECT_RATE = 0.05


def _model(cfg: ExperimentConfig, n: int):
    cls = VoronoiModel if cfg.mosaic == "voronoi" else HyperplaneModel
    return cls.from_rho(n, cfg.rho_at(n), cfg.alpha)


def _safe_exp(x: float) -> float:
    return math.exp(x) if x > -745.0 else 0.0


def _div(x: float, n: int) -> float:
    return x / n if math.isfinite(x) else x


def _rate_or_nan(fn, *args) -> float:
    return fn(*args) if args[0] > 0 else math.nan


def cmd_law(cfg: ExperimentConfig) -> str:
    """Exact Voronoi probabilities, or hyperplane bounds, at each ``(n, R)``."""
    rho_lim = cfg.rho_limit
    rows = []
    if cfg.mosaic == "voronoi":
        columns = ["n", "R", "radius", "rho_n", "exact_P_le", "exact_P_ge", "log_exact_P_le",
                   "log_exact_P_ge", "sigma", "vor_rate"]
        for n in cfg.n_list:
            m = _model(cfg, n)
            sig = vorlaw.sigma(m)
            for R in cfg.R_list:
                r = cfg.radius(n, R)
                rows.append([n, R, r, cfg.rho_at(n), vorlaw.cdf_norm(m, r), math.exp(vorlaw.log_sf_norm(m, r)),
                             vorlaw.log_cdf_norm(m, r), vorlaw.log_sf_norm(m, r), sig,
                             _rate_or_nan(vorlaw.vor_rate, R, rho_lim)])
    else:
        columns = ["n", "R", "radius", "rho_n", "gamma", "smallball_bound_P_le", "tail_bound_P_ge",
                   "log_smallball_bound_P_le", "log_tail_bound_P_ge", "log_smallball_normalized_P_le",
                   "sigma_bound", "upper_rate", "smallball_rate"]
        for n in cfg.n_list:
            m = _model(cfg, n)
            sig = math.exp(0.5 * hyplaw.hyp_moment_bound(m, 2))
            for R in cfg.R_list:
                r = cfg.radius(n, R)
                lt, ls = hyplaw.log_tail_upper(m, r), hyplaw.log_smallball_upper(m, r)
                if R > 0:
                    rep = hyplaw.rate_report(rho_lim, R)
                    up, sb = rep.upper_rate, rep.smallball_rate
                else:
                    up = sb = math.nan
                ln = hyplaw.log_smallball_upper_normalized(m, r)
                rows.append([n, R, r, cfg.rho_at(n), m.gamma, _safe_exp(ls), _safe_exp(lt), ls, lt, ln, sig, up, sb])
    return write_csv(columns, rows, cfg.sha256())


def _voronoi_chunk(model, W, steps, size, rng):
    return sample_Y_voronoi_batch(model, size, rng, W, steps)


def _hyperplane_chunk(model, W, steps, size, rng):
    # the window check runs once on the merged count
    return sample_Y_hyperplane_batch(model, size, rng, W, steps, max_reject_rate=1.0)


def simulate_norms(cfg: ExperimentConfig, n: int, workers: int = 1) -> tuple[np.ndarray, int]:
    """``cfg.trials`` pipeline draws of ``|Y|`` in dimension ``n`` and the
    number of realizations whose cell was unbounded in the initial window."""
    model = _model(cfg, n)
    fn = _voronoi_chunk if cfg.mosaic == "voronoi" else _hyperplane_chunk
    task = functools.partial(fn, model, cfg.window, cfg.steps)
    parts = estimate.run_chunked(task, cfg.trials, [cfg.seed, n], workers)
    norms, rejected = np.concatenate([p[0] for p in parts]), int(sum(p[1] for p in parts))
    if cfg.mosaic == "hyperplane" and cfg.trials >= 20 and rejected / cfg.trials > MAX_REJECT_RATE:
        raise WindowTooSmallError(rejected / cfg.trials, cfg.trials)
    return norms, rejected


def cmd_simulate(cfg: ExperimentConfig, workers: int = 1) -> tuple[str, dict]:
    """Monte Carlo ``P(|Y| >= radius)`` with Wilson intervals, next to the
    exact value (Voronoi) or the tail bound (hyperplane)."""
    t0 = time.perf_counter()
    ref = "exact_P_ge" if cfg.mosaic == "voronoi" else "tail_bound_P_ge"
    columns = ["n", "R", "radius", "p_hat", "lo", "hi", "n_samples", "n_rejected", "seed", ref]
    rows = []
    for n in cfg.n_list:
        norms, rejected = simulate_norms(cfg, n, workers)
        model = _model(cfg, n)
        for R in cfg.R_list:
            r = cfg.radius(n, R)
            est = estimate.binomial_estimate(int(np.count_nonzero(norms >= r)), len(norms), cfg.level, rejected)
            exact = (math.exp(vorlaw.log_sf_norm(model, r)) if cfg.mosaic == "voronoi"
                     else hyplaw.tail_upper(model, r))
            rows.append([n, R, r, est.p_hat, est.lo, est.hi, est.n_samples, est.n_rejected, cfg.seed, exact])
    text = write_csv(columns, rows, cfg.sha256())
    manifest = {
        "command": "simulate",
        "config": cfg.to_dict(),
        "config_sha256": cfg.sha256(),
        "version": __version__,
        "workers": workers,
        "wall_time_s": time.perf_counter() - t0,
    }
    return text, manifest


def cmd_threshold_sweep(cfg: ExperimentConfig) -> tuple[str, dict[str, str]]:
    """Finite-``n`` probabilities and rates at radius ``R n^(1/2 - alpha)``
    across ``n_list``, with the limiting rates alongside."""
    if len(cfg.n_list) < 3:
        raise ConfigError("threshold sweep needs at least 3 dimensions", field="n_list")
    rho_lim = cfg.rho_limit
    thr = vorlaw.vor_threshold(rho_lim)
    rows = []
    if cfg.mosaic == "voronoi":
        columns = ["n", "R", "radius", "rho_n", "log_P_le", "P_le", "rate_le", "log_P_ge", "rate_ge",
                   "vor_rate", "threshold"]
        for n in cfg.n_list:
            m = _model(cfg, n)
            for R in cfg.R_list:
                r = cfg.radius(n, R, scaled=True)
                lp, lq = vorlaw.log_cdf_norm(m, r), vorlaw.log_sf_norm(m, r)
                # -ln P(|Y| >= r) is the exponent lam kappa_n r^n itself
                rate_ge = _div(vorlaw.log_exponent(m, r), n) if r > 0 else math.nan
                rows.append([n, R, r, cfg.rho_at(n), lp, _safe_exp(lp), _div(lp, n), lq, rate_ge,
                             _rate_or_nan(vorlaw.vor_rate, R, rho_lim), thr])
    else:
        columns = ["n", "R", "radius", "rho_n", "log_tail_bound", "tail_bound", "rate_tail_bound",
                   "log_smallball_bound", "rate_smallball_bound", "rate_smallball_normalized", "c",
                   "upper_rate", "smallball_rate",
                   "R_lower", "R_upper", "threshold"]
        for n in cfg.n_list:
            m = _model(cfg, n)
            for R in cfg.R_list:
                r = cfg.radius(n, R, scaled=True)
                lt, ls = hyplaw.log_tail_upper(m, r), hyplaw.log_smallball_upper(m, r)
                if R > 0:
                    rep = hyplaw.rate_report(rho_lim, R)
                    c, up, sb = rep.c, rep.upper_rate, rep.smallball_rate
                else:
                    c, up, sb = 0.0, math.nan, math.nan
                ln = hyplaw.log_smallball_upper_normalized(m, r)
                rows.append([n, R, r, cfg.rho_at(n), lt, _safe_exp(lt), _div(lt, n), ls, _div(ls, n), _div(ln, n),
                             c, up, sb,
                             hyplaw.solve_r_lower(rho_lim), hyplaw.r_upper(rho_lim), thr])
    text = write_csv(columns, rows, cfg.sha256())
    return text, sweep_svgs(text)


DEFAULT_RATE_GRID = (0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0)


def cmd_rates(cfg: ExperimentConfig | None = None) -> str:
    """Limiting rates of both mosaics on a grid of scaled radii."""
    rho = 0.0 if cfg is None else cfg.rho_limit
    if cfg is None:
        grid = sorted(DEFAULT_RATE_GRID + (vorlaw.vor_threshold(rho), hyplaw.r_upper(rho)))
    else:
        grid = cfg.R_list
    digest = "none" if cfg is None else cfg.sha256()
    columns = ["rho", "R", "vor_rate", "vor_threshold", "c", "upper_rate", "smallball_rate",
               "upper_valid", "smallball_valid", "R_lower", "R_upper"]
    rows = []
    for R in grid:
        if not R > 0:
            continue
        rep = hyplaw.rate_report(rho, R)
        rows.append([rho, R, vorlaw.vor_rate(R, rho), vorlaw.vor_threshold(rho), rep.c, rep.upper_rate,
                     rep.smallball_rate, rep.upper_valid, rep.smallball_valid, rep.R_lower, rep.R_upper])
    return write_csv(columns, rows, digest)


def manifest_json(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True) + "\n"
