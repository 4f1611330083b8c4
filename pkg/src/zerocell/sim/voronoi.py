"""Simulation of the Poisson-Voronoi zero cell."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .. import geom
from .. import specfun as sf
from ..vorlaw import VoronoiModel
from .estimate import EstimateCI, binomial_estimate

# proposals before box rejection gives way to hit-and-run
REJECTION_BUDGET = 4096
MAX_EXTENSIONS = 60
# mean number of Poisson points beyond which window extension gives up
MAX_MEAN_POINTS = 2.0e5


class VoronoiWindowError(RuntimeError):
    """Certifying the zero cell would need an impractically large window."""


def default_window(model: VoronoiModel) -> float:
    """Radius ``W`` with ``lam kappa_n W^n = 20`` (empty window has probability e^-20)."""
    return math.exp((math.log(20.0) - model.log_lambda - sf.log_kappa(model.n)) / model.n)


def _mean_count(model: VoronoiModel, r_lo: float, r_hi: float) -> float:
    lk = model.log_lambda + sf.log_kappa(model.n)
    n = model.n
    if r_lo == 0:
        return math.exp(lk + n * math.log(r_hi))
    return math.exp(lk + n * math.log(r_hi)) - math.exp(lk + n * math.log(r_lo))


def ppp_ball(model: VoronoiModel, W: float, rng: np.random.Generator, inner: float = 0.0) -> np.ndarray:
    """Poisson points of intensity ``lam`` in ``B_n(W)``, or in the shell
    ``inner < |x| <= W`` when ``inner > 0``."""
    n = model.n
    count = rng.poisson(_mean_count(model, inner, W))
    u = geom.sample_sphere(n, rng, count)
    v = rng.random(count)
    radius = (inner ** n + v * (W ** n - inner ** n)) ** (1.0 / n)
    return u * radius[:, None]


def voronoi_zero_cell(points, query=None) -> tuple[np.ndarray, Callable]:
    """Nucleus of the cell containing ``query`` (default: the origin) and a
    membership test for that cell. Ties go to the lowest index."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        raise ValueError("need at least one nucleus")
    q = np.zeros(pts.shape[1]) if query is None else np.asarray(query, dtype=float)
    nucleus = pts[int(np.argmin(np.linalg.norm(pts - q, axis=1)))]

    def membership(y) -> bool | np.ndarray:
        y = np.asarray(y, dtype=float)
        d0 = np.linalg.norm(y - nucleus, axis=-1)
        d = np.linalg.norm(y[..., None, :] - pts, axis=-1)
        return np.all(d0[..., None] <= d, axis=-1)

    return nucleus, membership


def voronoi_cell_polytope(points, nucleus) -> geom.Polytope:
    """Cell of ``nucleus`` shifted so the nucleus is at the origin:
    ``<z, d_j> <= |d_j|^2 / 2`` with ``d_j = x_j - nucleus``."""
    d = np.asarray(points, dtype=float) - np.asarray(nucleus, dtype=float)
    dist = np.linalg.norm(d, axis=1)
    keep = dist > 0
    d, dist = d[keep], dist[keep]
    return geom.Polytope(d / dist[:, None], 0.5 * dist)


def _resolved_cell(model: VoronoiModel, W: float, rng: np.random.Generator):
    """Centered zero cell with a bounding box, exact for the unwindowed process,
    and whether the cell was unbounded (or empty) in the initial window.

    The window grows until every point ``y`` of the computed cell satisfies
    ``|y| + |y - nucleus| <= W``, which rules out a closer nucleus outside it.
    """
    pts = ppp_ball(model, W, rng)
    extensions = 0
    reach = math.inf
    unbounded_at_start = None
    while True:
        if extensions > MAX_EXTENSIONS:  # pragma: no cover - defensive
            raise RuntimeError("window extension did not terminate")
        if len(pts) <= model.n + 1:
            W_new = 2.0 * W
            unbounded_at_start = True if unbounded_at_start is None else unbounded_at_start
        else:
            nucleus = pts[int(np.argmin(np.linalg.norm(pts, axis=1)))]
            d = np.linalg.norm(pts - nucleus, axis=1)
            near = pts[(d > 0) & (d <= 2.0 * reach)]
            try:
                if len(near) <= model.n:
                    raise geom.UnboundedBodyError("too few neighbours")
                poly = voronoi_cell_polytope(near, nucleus)
                lo, hi = geom.bounding_box(poly)
            except geom.UnboundedBodyError:
                W_new = 2.0 * W
                unbounded_at_start = True if unbounded_at_start is None else unbounded_at_start
            else:
                unbounded_at_start = False if unbounded_at_start is None else unbounded_at_start
                reach = float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))
                need = float(np.linalg.norm(nucleus)) + 2.0 * reach
                if need <= W:
                    keep = poly.offsets <= reach
                    cell = geom.Polytope(poly.normals[keep], poly.offsets[keep])
                    return cell, (lo, hi), unbounded_at_start
                W_new = min(need * (1.0 + 1e-9), 2.0 * W)
        if _mean_count(model, 0.0, W_new) > MAX_MEAN_POINTS:
            raise VoronoiWindowError(
                f"certifying the zero cell needs window radius {W_new:.3g} "
                f"(mean {_mean_count(model, 0.0, W_new):.3g} points); n={model.n} is beyond this sampler")
        pts = np.vstack([pts, ppp_ball(model, W_new, rng, inner=W)])
        W = W_new
        extensions += 1


def _uniform_in_cell(cell: geom.Polytope, box, rng: np.random.Generator, steps: int | None) -> np.ndarray:
    lo, hi = box
    for _ in range(REJECTION_BUDGET // 256):
        cand = lo + rng.random((256, cell.dim)) * (hi - lo)
        ok = cell.contains(cand, tol=0.0)
        if ok.any():
            return cand[int(np.argmax(ok))]
    # low acceptance in higher dimension: chain from the nucleus
    return geom.uniform_in_polytope(cell, np.zeros(cell.dim), rng, steps)


def sample_Y_voronoi_batch(model: VoronoiModel, size: int, rng: np.random.Generator,
                           W: float | None = None, steps: int | None = None) -> tuple[np.ndarray, int]:
    """``size`` draws of ``|Y|`` from simulated zero cells, and the number of
    realizations whose cell was unbounded in the initial window (each is
    completed by window extension, not discarded)."""
    W = default_window(model) if W is None else W
    out = np.empty(size)
    rejected = 0
    for i in range(size):
        cell, box, unbounded = _resolved_cell(model, W, rng)
        rejected += unbounded
        out[i] = np.linalg.norm(_uniform_in_cell(cell, box, rng, steps))
    return out, rejected


def sample_Y_voronoi(model: VoronoiModel, W: float | None, rng: np.random.Generator) -> float:
    """One draw of ``|Y|``: Poisson points, nearest nucleus to the origin,
    uniform point of its cell, distance to the nucleus."""
    norms, _ = sample_Y_voronoi_batch(model, 1, rng, W)
    return float(norms[0])


def void_indicator(points, x) -> bool:
    """True when no point lies in the open ball ``B(x, |x|)``."""
    x = np.asarray(x, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        return True
    return bool(np.all(np.linalg.norm(pts - x, axis=1) >= np.linalg.norm(x)))


def slivnyak_void_check(model: VoronoiModel, x, trials: int, rng: np.random.Generator,
                        level: float = 0.95) -> EstimateCI:
    """Fraction of Poisson realizations with ``B(x, |x|)`` empty; the target is
    ``exp(-lam kappa_n |x|^n)``, the Voronoi density at ``x`` divided by ``lam``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0:
        return binomial_estimate(trials, trials, level)
    hits = 0
    for _ in range(trials):
        hits += void_indicator(ppp_ball(model, 2.0 * r, rng), x)
    return binomial_estimate(hits, trials, level)
