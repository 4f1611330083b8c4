"""Binomial estimates, Wilson intervals and the deterministic chunked runner."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable, Sequence

import numpy as np

WORKERS_ENV = "ZEROCELL_WORKERS"
DEFAULT_CHUNK = 1000


@dataclass(frozen=True)
class EstimateCI:
    p_hat: float
    lo: float
    hi: float
    n_samples: int
    n_rejected: int = 0

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials < 1:
        raise ValueError("need at least one trial")
    if not 0 < level < 1:
        raise ValueError("confidence level must lie in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2.0) / (1.0 + z2n)
    half = z / (1.0 + z2n) * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials))
    lo = 0.0 if successes == 0 else max(0.0, min(p, center - half))
    hi = 1.0 if successes == trials else min(1.0, max(p, center + half))
    return lo, hi


def binomial_estimate(successes: int, trials: int, level: float = 0.95, n_rejected: int = 0) -> EstimateCI:
    lo, hi = wilson_interval(successes, trials, level)
    return EstimateCI(successes / trials, lo, hi, trials, n_rejected)


def estimate_probability(event_sampler: Callable[[np.random.Generator], bool], trials: int,
                         level: float, rng: np.random.Generator) -> EstimateCI:
    """Run ``event_sampler(rng)`` ``trials`` times and wrap the hit rate in a Wilson interval."""
    if trials < 1:
        raise ValueError("need at least one trial")
    hits = sum(bool(event_sampler(rng)) for _ in range(trials))
    return binomial_estimate(hits, trials, level)


def default_workers() -> int:
    value = os.environ.get(WORKERS_ENV)
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {value!r}") from None


def chunk_sizes(trials: int, chunk: int = DEFAULT_CHUNK) -> list[int]:
    full, rest = divmod(trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _run_chunk(task, size, seed_seq):
    return task(size, np.random.default_rng(seed_seq))


def run_chunked(task: Callable, trials: int, seed: int | Sequence[int], workers: int = 1,
                chunk: int = DEFAULT_CHUNK) -> list:
    """Split ``trials`` into fixed-size chunks, one child seed per chunk.

    ``seed`` is an integer or a sequence of integers (SeedSequence entropy).
    ``task(size, rng)`` must be picklable when ``workers > 1``. Child seeds
    come from ``SeedSequence(seed).spawn`` in chunk order, so the merged
    output does not depend on ``workers``.
    """
    sizes = chunk_sizes(trials, chunk)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    if workers <= 1 or len(sizes) == 1:
        return [_run_chunk(task, s, q) for s, q in zip(sizes, seeds)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chunk, [task] * len(sizes), sizes, seeds))
