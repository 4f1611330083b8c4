"""Geometric primitives: sphere and ball sampling, halfspace polytopes,
the inball (Chebyshev) center and uniform sampling inside polytopes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import simplex

NORM_TOL = 1e-12
FEAS_TOL = 1e-9
# above this many constraints LPs are solved by constraint generation
LAZY_THRESHOLD = 96


class InfeasibleCenterError(ValueError):
    """Starting point of a chain is not strictly inside the polytope."""


class UnboundedBodyError(ArithmeticError):
    """A chord or a bounding LP found the body unbounded."""


@dataclass(frozen=True)
class Halfspace:
    u: np.ndarray
    t: float

    def __post_init__(self):
        if abs(float(np.linalg.norm(self.u)) - 1.0) > NORM_TOL:
            raise ValueError("halfspace normal must have unit length")
        if self.t < 0:
            raise ValueError("halfspace offset must be nonnegative (origin inside)")


class Polytope:
    """Intersection of halfspaces ``<x, u_i> <= t_i`` with ``t_i >= 0``.

    Normals are stored row-wise in ``normals`` (shape ``(m, n)``), offsets in
    ``offsets``.
    """

    def __init__(self, normals, offsets):
        U = np.atleast_2d(np.asarray(normals, dtype=float))
        t = np.atleast_1d(np.asarray(offsets, dtype=float))
        if U.shape[0] == 0:
            raise ValueError("a polytope needs at least one halfspace")
        if U.shape[0] != t.shape[0]:
            raise ValueError("normals and offsets disagree in length")
        if np.any(np.abs(np.linalg.norm(U, axis=1) - 1.0) > NORM_TOL):
            raise ValueError("halfspace normals must have unit length")
        if np.any(t < 0):
            raise ValueError("halfspace offsets must be nonnegative (origin inside)")
        self.normals = U
        self.offsets = t

    @classmethod
    def from_inequalities(cls, A, b) -> "Polytope":
        """Normalize rows of ``A x <= b`` to unit normals."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float)
        norms = np.linalg.norm(A, axis=1)
        return cls(A / norms[:, None], b / norms)

    @classmethod
    def from_halfspaces(cls, halfspaces) -> "Polytope":
        halfspaces = list(halfspaces)
        return cls([h.u for h in halfspaces], [h.t for h in halfspaces])

    @classmethod
    def cube(cls, n: int, half_width: float = 1.0) -> "Polytope":
        eye = np.eye(n)
        return cls(np.vstack([eye, -eye]), np.full(2 * n, float(half_width)))

    @property
    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(u, float(t)) for u, t in zip(self.normals, self.offsets)]

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def __len__(self):
        return self.normals.shape[0]

    def slack(self, x) -> np.ndarray:
        return self.offsets - np.asarray(x, dtype=float) @ self.normals.T

    def contains(self, x, tol: float = FEAS_TOL):
        """Membership of a point, or of each row of a point array."""
        return np.all(self.slack(x) >= -tol, axis=-1)

    def translate(self, v) -> "Polytope":
        return Polytope(self.normals, self.offsets + self.normals @ np.asarray(v, dtype=float))

    def intersect(self, other: "Polytope") -> "Polytope":
        return Polytope(np.vstack([self.normals, other.normals]),
                        np.concatenate([self.offsets, other.offsets]))

    def permuted(self, order) -> "Polytope":
        return Polytope(self.normals[order], self.offsets[order])


@dataclass
class InballResult:
    center: np.ndarray | None
    inradius: float
    status: str  # "optimal" | "unbounded" | "degenerate"


def _maximize(cost, A, b, free) -> simplex.LPResult:
    """Solve ``max cost.x, A x <= b``, adding constraints lazily when ``A`` is tall.

    Constraints enter tightest offset first; whenever the restricted optimum
    violates an excluded row, the most violated rows are appended.
    """
    m = A.shape[0]
    if m <= LAZY_THRESHOLD:
        return simplex.maximize(cost, A, b, free=free)
    order = np.argsort(b, kind="stable")
    k = A.shape[1]
    active = np.zeros(m, dtype=bool)
    active[order[:min(m, 8 * k)]] = True
    while True:
        idx = np.flatnonzero(active)
        res = simplex.maximize(cost, A[idx], b[idx], free=free)
        if res.status == "unbounded":
            if active.all():
                return res
            grow = order[~active[order]][:max(len(idx), 8 * k)]
            active[grow] = True
            continue
        viol = A @ res.x - b
        viol[active] = -np.inf
        bad = np.flatnonzero(viol > FEAS_TOL * max(1.0, float(b.max())))
        if bad.size == 0:
            return res
        worst = bad[np.argsort(-viol[bad], kind="stable")[:4 * k]]
        active[worst] = True


def chebyshev_center(poly: Polytope) -> InballResult:
    """Center and radius of the largest ball inside ``poly``.

    Solves ``max r`` subject to ``<c, u_i> + r <= t_i``. The status is
    ``degenerate`` when the active constraints do not pin the center down
    (the rows ``(u_i, 1)`` of the active set have rank below ``n + 1``).
    """
    U, t = poly.normals, poly.offsets
    m, n = U.shape
    A = np.hstack([U, np.ones((m, 1))])
    cost = np.zeros(n + 1)
    cost[n] = 1.0
    free = np.ones(n + 1, dtype=bool)
    free[n] = False
    res = _maximize(cost, A, t, free)
    if res.status == "unbounded":
        return InballResult(None, math.inf, "unbounded")
    center, r = res.x[:n], float(res.x[n])
    gap = t - U @ center - r
    active = gap <= FEAS_TOL * max(1.0, float(np.max(t)))
    rank = np.linalg.matrix_rank(A[active], tol=1e-9) if active.any() else 0
    status = "optimal" if rank == n + 1 else "degenerate"
    return InballResult(center, r, status)


def bounding_box(poly: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned bounding box from ``2n`` LPs; raises if unbounded."""
    n = poly.dim
    lo, hi = np.empty(n), np.empty(n)
    free = np.ones(n, dtype=bool)
    for i in range(n):
        for sign, out in ((1.0, hi), (-1.0, lo)):
            cost = np.zeros(n)
            cost[i] = sign
            res = _maximize(cost, poly.normals, poly.offsets, free)
            if res.status == "unbounded":
                raise UnboundedBodyError("polytope is unbounded")
            out[i] = sign * res.value
    return lo, hi


def sample_sphere(n: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform direction(s) on the unit sphere in ``R^n``."""
    shape = (n,) if size is None else (*np.atleast_1d(size), n)
    g = rng.standard_normal(shape)
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    while np.any(norm == 0):  # pragma: no cover - probability zero
        g = rng.standard_normal(shape)
        norm = np.linalg.norm(g, axis=-1, keepdims=True)
    return g / norm


def uniform_in_ball(n: int, R: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniform point(s) in the closed ball of radius ``R``."""
    if not R > 0:
        raise ValueError("ball radius must be positive")
    u = sample_sphere(n, rng, size)
    radius = R * rng.random(None if size is None else u.shape[:-1]) ** (1.0 / n)
    return u * np.expand_dims(radius, -1)


def default_steps(n: int) -> int:
    """Hit-and-run length: ``200 n`` steps after ``100 n`` burn-in."""
    return 300 * n


def hit_and_run(normals, offsets, start, rng: np.random.Generator, steps: int) -> np.ndarray:
    """Run independent hit-and-run chains, one per polytope, in lockstep.

    ``normals`` has shape ``(B, m, n)``, ``offsets`` ``(B, m)`` and ``start``
    ``(B, n)``. Polytopes with fewer constraints may be padded with zero
    normals and positive offsets, which never bind.
    """
    A = np.asarray(normals, dtype=float)
    b = np.asarray(offsets, dtype=float)
    x = np.array(start, dtype=float)
    B, _, n = A.shape
    slack = b - np.matmul(A, x[:, :, None])[:, :, 0]
    if np.any(slack <= 0):
        raise InfeasibleCenterError("chain start must be strictly inside the polytope")
    for _ in range(steps):
        d = sample_sphere(n, rng, B)
        ad = np.matmul(A, d[:, :, None])[:, :, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = slack / ad
        hi = np.where(ad > 0, ratio, np.inf).min(axis=1)
        lo = np.where(ad < 0, ratio, -np.inf).max(axis=1)
        if not (np.all(np.isfinite(hi)) and np.all(np.isfinite(lo))):
            raise UnboundedBodyError("chord is unbounded: the body is not bounded")
        s = lo + rng.random(B) * (hi - lo)
        x += s[:, None] * d
        slack = np.maximum(b - np.matmul(A, x[:, :, None])[:, :, 0], 0.0)
    return x


def uniform_in_polytope_batch(poly: Polytope, center, rng: np.random.Generator, size: int,
                              steps: int | None = None) -> np.ndarray:
    """``size`` independent hit-and-run draws in ``poly`` started at ``center``."""
    steps = default_steps(poly.dim) if steps is None else steps
    A = np.broadcast_to(poly.normals, (size, *poly.normals.shape))
    b = np.broadcast_to(poly.offsets, (size, len(poly)))
    start = np.broadcast_to(np.asarray(center, dtype=float), (size, poly.dim))
    return hit_and_run(A, b, start, rng, steps)


def uniform_in_polytope(poly: Polytope, center, rng: np.random.Generator,
                        steps: int | None = None) -> np.ndarray:
    """One approximately uniform point of ``poly`` by hit-and-run from ``center``."""
    return uniform_in_polytope_batch(poly, center, rng, 1, steps)[0]


def uniform_in_polytope_rejection(poly: Polytope, rng: np.random.Generator, size: int = 1,
                                  box=None, batch: int = 256,
                                  max_attempts: int = 10_000_000) -> np.ndarray:
    """Exact uniform draws by rejection from the bounding box.

    Practical in low dimension only; raises when ``max_attempts`` proposals
    are exhausted.
    """
    lo, hi = bounding_box(poly) if box is None else box
    out = np.empty((size, poly.dim))
    got = attempts = 0
    while got < size:
        if attempts >= max_attempts:
            raise ArithmeticError("rejection sampler exhausted its attempt budget")
        cand = lo + rng.random((batch, poly.dim)) * (hi - lo)
        attempts += batch
        ok = cand[poly.contains(cand, tol=0.0)]
        take = min(size - got, len(ok))
        out[got:got + take] = ok[:take]
        got += take
    return out
