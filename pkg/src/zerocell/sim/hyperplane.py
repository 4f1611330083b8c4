"""Simulation of the isotropic Poisson hyperplane process, its zero cell and
its typical cell."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .. import geom
from ..hyplaw import HyperplaneModel, log_f0, log_simplex_normalization

log = logging.getLogger(__name__)

MAX_WINDOW_DOUBLINGS = 60


class WindowTooSmallError(RuntimeError):
    def __init__(self, rate: float, size: int):
        super().__init__(f"unbounded-cell rate {rate:.3f} over {size} realizations exceeds the limit; "
                         "increase the window radius")
        self.rate = rate
        self.size = size


class RejectionStallError(RuntimeError):
    pass


@dataclass
class HyperplaneRealization:
    """Hyperplanes ``<x, u> = tau`` with ``|tau| <= window_radius``."""

    window_radius: float
    normals: np.ndarray  # (k, n)
    taus: np.ndarray  # (k,)

    def __len__(self):
        return len(self.taus)


def default_window(model: HyperplaneModel) -> float:
    """``10 / (gamma f_n(0))``: ten times the scale of the tail exponent."""
    return 10.0 / (model.gamma * math.exp(log_f0(model.n)))


def _hyperplanes(n: int, gamma: float, t_lo: float, t_hi: float, rng, signed: bool = True):
    count = rng.poisson(2.0 * gamma * (t_hi - t_lo))
    normals = geom.sample_sphere(n, rng, count)
    taus = rng.uniform(t_lo, t_hi, count)
    if signed:
        taus = taus * rng.choice((-1.0, 1.0), count)
    return normals, taus


def sample_hyperplane_process(model: HyperplaneModel, W: float, rng: np.random.Generator) -> HyperplaneRealization:
    """Hyperplanes of the process hitting ``B_n(W)``: a Poisson(``2 gamma W``)
    number, uniform directions, offsets uniform on ``[-W, W]``."""
    if not W > 0:
        raise ValueError("window radius must be positive")
    count = rng.poisson(2.0 * model.gamma * W)
    normals = geom.sample_sphere(model.n, rng, count)
    taus = rng.uniform(-W, W, count)
    return HyperplaneRealization(W, normals, taus)


def extend_realization(real: HyperplaneRealization, model: HyperplaneModel, W_new: float,
                       rng: np.random.Generator) -> HyperplaneRealization:
    """Add the hyperplanes with ``W < |tau| <= W_new``; the result is a
    realization of the same process in the larger window."""
    if W_new <= real.window_radius:
        return real
    normals, taus = _hyperplanes(model.n, model.gamma, real.window_radius, W_new, rng)
    return HyperplaneRealization(W_new, np.vstack([real.normals, normals]),
                                 np.concatenate([real.taus, taus]))


def zero_cell_hyperplane(real: HyperplaneRealization) -> geom.Polytope:
    """Origin side of every hyperplane: ``<x, sign(tau) u> <= |tau|`` (sign of 0 is +)."""
    if len(real) == 0:
        raise ValueError("empty realization has no zero cell polytope")
    sign = np.where(real.taus < 0, -1.0, 1.0)
    return geom.Polytope(real.normals * sign[:, None], np.abs(real.taus))


def segment_hit_counts(model: HyperplaneModel, x, r: float, W: float, trials: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Per realization, the number of hyperplanes hitting ``[0, x]`` and missing
    the open ball ``B_n(r)``. Requires ``W >= |x|``."""
    x = np.asarray(x, dtype=float)
    if W < np.linalg.norm(x):
        raise ValueError("window must contain the segment")
    counts = rng.poisson(2.0 * model.gamma * W, trials)
    total = int(counts.sum())
    normals = geom.sample_sphere(model.n, rng, total)
    taus = rng.uniform(-W, W, total)
    proj = normals @ x
    hit = (taus * proj >= 0) & (np.abs(taus) <= np.abs(proj)) & (np.abs(taus) >= r)
    owner = np.repeat(np.arange(trials), counts)
    return np.bincount(owner[hit], minlength=trials)


def _resolved_zero_cell(model: HyperplaneModel, W: float, rng: np.random.Generator):
    """Zero cell and inball for one realization, whether the initial window
    left the cell unbounded, and the number of window extensions.

    The window grows until the cell is bounded and contained in it, so the
    cell equals the zero cell of the unwindowed process.
    """
    real = sample_hyperplane_process(model, W, rng)
    extensions = 0
    unbounded_at_start = None
    while True:
        if extensions > MAX_WINDOW_DOUBLINGS:  # pragma: no cover - defensive
            raise RuntimeError("window extension did not terminate")
        poly = zero_cell_hyperplane(real) if len(real) > model.n else None
        ball = geom.chebyshev_center(poly) if poly is not None else None
        bounded = ball is not None and ball.status != "unbounded"
        if bounded:
            try:
                lo, hi = geom.bounding_box(poly)
            except geom.UnboundedBodyError:
                bounded = False
        if unbounded_at_start is None:
            unbounded_at_start = not bounded
        if not bounded:
            W_new = 2.0 * real.window_radius
        else:
            reach = float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))
            if reach <= real.window_radius:
                return poly, ball, unbounded_at_start, extensions
            W_new = min(reach * (1.0 + 1e-9), 2.0 * real.window_radius)
        real = extend_realization(real, model, W_new, rng)
        extensions += 1


def sample_Y_hyperplane_batch(model: HyperplaneModel, size: int, rng: np.random.Generator,
                              W: float | None = None, steps: int | None = None,
                              max_reject_rate: float = 0.05) -> tuple[np.ndarray, int]:
    """``size`` independent draws of ``|Y|`` and the number of realizations
    whose cell was unbounded in the initial window.

    Each draw: realization, zero cell, inball center, hit-and-run inside the
    cell from that center, distance to the center. Windows are extended
    until the cell is certified, so the count measures window adequacy
    rather than discarded draws.
    """
    W = default_window(model) if W is None else W
    steps = geom.default_steps(model.n) if steps is None else steps
    polys, centers, rejected, extended = [], [], 0, 0
    for _ in range(size):
        poly, ball, unbounded, ext = _resolved_zero_cell(model, W, rng)
        rejected += unbounded
        extended += ext > 0
        polys.append(poly)
        centers.append(ball.center)
    if size >= 20 and rejected / size > max_reject_rate:
        raise WindowTooSmallError(rejected / size, size)
    if extended:
        log.debug("hyperplane window extended for %d of %d realizations", extended, size)
    m = max(len(p) for p in polys)
    A = np.zeros((size, m, model.n))
    b = np.ones((size, m))
    for i, p in enumerate(polys):
        A[i, :len(p)] = p.normals
        b[i, :len(p)] = p.offsets
    start = np.array(centers)
    pts = geom.hit_and_run(A, b, start, rng, steps)
    return np.linalg.norm(pts - start, axis=1), rejected


def sample_Y_hyperplane(model: HyperplaneModel, W: float | None, rng: np.random.Generator,
                        steps: int | None = None) -> float:
    norms, _ = sample_Y_hyperplane_batch(model, 1, rng, W, steps)
    return float(norms[0])


# ---------------------------------------------------------------------------
# typical cell


def regular_simplex_volume(n: int) -> float:
    """Volume of the regular simplex inscribed in the unit sphere: the largest
    simplex with vertices on the sphere."""
    return math.sqrt(n + 1) / math.factorial(n) * ((n + 1) / n) ** (n / 2)


def simplex_volume_and_hull(U: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Volumes of the simplices with vertices ``U[b]`` (shape ``(B, n+1, n)``)
    and whether each contains the origin."""
    B, k, n = U.shape
    edges = U[:, 1:, :] - U[:, :1, :]
    vol = np.abs(np.linalg.det(edges)) / math.factorial(n)
    M = np.ones((B, n + 1, n + 1))
    M[:, :n, :] = np.swapaxes(U, 1, 2)
    rhs = np.zeros((B, n + 1, 1))
    rhs[:, n, 0] = 1.0
    ok = vol > 1e-14
    inside = np.zeros(B, dtype=bool)
    if ok.any():
        w = np.linalg.solve(M[ok], rhs[ok])[:, :, 0]
        inside[ok] = np.all(w >= 0.0, axis=1)
    return vol, inside


def sample_simplex_directions(n: int, rng: np.random.Generator, size: int = 1, batch: int = 2048,
                              max_proposals: int = 20_000_000) -> np.ndarray:
    """Tuples ``(U_0..U_n)`` with density proportional to simplex volume times
    the indicator that the simplex contains the origin, by rejection against
    uniform tuples with envelope ``regular_simplex_volume(n)``."""
    envelope = regular_simplex_volume(n)
    out = np.empty((size, n + 1, n))
    got = proposals = 0
    while got < size:
        U = geom.sample_sphere(n, rng, (batch, n + 1))
        vol, inside = simplex_volume_and_hull(U)
        accept = inside & (rng.random(batch) * envelope < vol)
        proposals += batch
        acc = U[accept]
        take = min(size - got, len(acc))
        out[got:got + take] = acc[:take]
        got += take
        if proposals >= max_proposals and got < size:
            raise RejectionStallError(f"simplex rejection acceptance {got / proposals:.2e} is too low for n={n}")
        if proposals >= 1_000_000 and got / proposals < 1e-6:
            raise RejectionStallError(f"simplex rejection acceptance {got / proposals:.2e} below 1e-6 for n={n}")
    return out


def sample_typical_cell_hyperplane(model: HyperplaneModel, W: float | None, rng: np.random.Generator):
    """Typical cell with inball center at the origin, and its inradius.

    The inradius is exponential with rate ``2 gamma``; the ``n+1`` touching
    facets have volume-weighted directions; the remaining hyperplanes are
    the process restricted to miss ``B_n(R)``, simulated for
    ``R <= |tau| <= W``. The polytope is exact inside ``B_n(W)``.
    """
    W = default_window(model) if W is None else W
    n = model.n
    R = rng.exponential(1.0 / (2.0 * model.gamma))
    U = sample_simplex_directions(n, rng)[0]
    normals, offsets = [U], [np.full(n + 1, R)]
    if W > R:
        extra_u, extra_t = _hyperplanes(n, model.gamma, R, W, rng, signed=False)
        normals.append(extra_u)
        offsets.append(extra_t)
    return geom.Polytope(np.vstack(normals), np.concatenate(offsets)), R


def typical_cell_membership(model: HyperplaneModel, x, trials: int, rng: np.random.Generator,
                            W: float | None = None) -> int:
    """Number of typical cells (out of ``trials``) containing the point ``x``."""
    x = np.asarray(x, dtype=float)
    W = default_window(model) if W is None else W
    if np.linalg.norm(x) > W:
        raise ValueError("point lies outside the window")
    hits = 0
    for _ in range(trials):
        poly, _ = sample_typical_cell_hyperplane(model, W, rng)
        hits += bool(poly.contains(x, tol=0.0))
    return hits


def log_simplex_envelope_ratio(n: int) -> float:
    """Log of the acceptance rate of the simplex-direction rejection sampler."""
    return log_simplex_normalization(n) - math.log(regular_simplex_volume(n))


__all__ = [
    "HyperplaneRealization",
    "WindowTooSmallError",
    "RejectionStallError",
    "default_window",
    "sample_hyperplane_process",
    "extend_realization",
    "zero_cell_hyperplane",
    "segment_hit_counts",
    "sample_Y_hyperplane",
    "sample_Y_hyperplane_batch",
    "regular_simplex_volume",
    "simplex_volume_and_hull",
    "sample_simplex_directions",
    "sample_typical_cell_hyperplane",
    "typical_cell_membership",
    "log_simplex_envelope_ratio",
]
