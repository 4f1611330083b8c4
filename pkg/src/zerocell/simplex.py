"""Dense tableau simplex for small LPs whose origin is feasible.

Solves ``max c.x  s.t.  A x <= b`` with ``b >= 0`` so that the slack basis
is an initial feasible point and no phase one is needed. Entering and
leaving variables follow Bland's lowest-index rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-12


@dataclass
class LPResult:
    status: str  # "optimal" | "unbounded"
    x: np.ndarray | None
    value: float
    pivots: int


def maximize(c, A, b, free=None, max_pivots: int = 50_000) -> LPResult:
    """Maximize ``c.x`` subject to ``A x <= b``.

    ``free`` is a boolean mask of variables without a sign constraint; the
    remaining variables are constrained to be nonnegative. All entries of
    ``b`` must be nonnegative.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, k = A.shape
    if np.any(b < 0):
        raise ValueError("right-hand side must be nonnegative (origin feasible)")
    free = np.zeros(k, dtype=bool) if free is None else np.asarray(free, dtype=bool)

    # columns: original vars, negated copies of free vars, slacks
    neg_idx = np.flatnonzero(free)
    cols = np.hstack([A, -A[:, neg_idx]])
    obj = np.concatenate([c, -c[neg_idx]])
    nv = cols.shape[1]

    T = np.zeros((m + 1, nv + m + 1))
    T[:m, :nv] = cols
    T[:m, nv:nv + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :nv] = -obj
    basis = np.arange(nv, nv + m)

    pivots = 0
    while True:
        candidates = np.flatnonzero(T[m, :-1] < -PIVOT_TOL)
        if candidates.size == 0:
            break
        e = candidates[0]
        col = T[:m, e]
        pos = col > PIVOT_TOL
        if not pos.any():
            return LPResult("unbounded", None, np.inf, pivots)
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + PIVOT_TOL * max(1.0, best))
        r = ties[np.argmin(basis[ties])]
        T[r] /= T[r, e]
        f = T[:, e].copy()
        f[r] = 0.0
        T -= np.outer(f, T[r])
        basis[r] = e
        pivots += 1
        if pivots > max_pivots:
            raise ArithmeticError("simplex pivot limit exceeded")

    z = np.zeros(nv + m)
    z[basis] = T[:m, -1]
    x = z[:k].copy()
    x[neg_idx] -= z[k:nv]
    return LPResult("optimal", x, float(c @ x), pivots)
