import time
from dataclasses import dataclass

import numpy as np
import pytest

from zerocell import HyperplaneModel, VoronoiModel
from zerocell.sim import sample_typical_cell_hyperplane, sample_Y_hyperplane_batch, sample_Y_voronoi_batch


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


def ks_critical(n_samples: int, alpha: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value."""
    c = {0.01: 1.6276, 0.05: 1.3581}[alpha]
    return c / np.sqrt(n_samples)


@dataclass
class Timed:
    values: np.ndarray
    rejected: int
    seconds: float


@pytest.fixture(scope="session")
def voronoi3_pipeline():
    """10^4 zero-cell pipeline draws of |Y|, n=3, lambda=1, with wall time."""
    model = VoronoiModel(3, 0.0)
    t0 = time.perf_counter()
    norms, rejected = sample_Y_voronoi_batch(model, 10_000, np.random.default_rng(31))
    return Timed(norms, rejected, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def hyperplane3_pipeline():
    """10^4 zero-cell pipeline draws of |Y|, n=3, lambda=1, with wall time."""
    model = HyperplaneModel.from_log_lambda(3, 0.0)
    t0 = time.perf_counter()
    norms, rejected = sample_Y_hyperplane_batch(model, 10_000, np.random.default_rng(32))
    return Timed(norms, rejected, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def typical_cells_plane():
    """10^4 typical cells of the planar hyperplane mosaic with gamma = 1."""
    model = HyperplaneModel.from_gamma(2, 1.0)
    rng = np.random.default_rng(34)
    t0 = time.perf_counter()
    cells = [sample_typical_cell_hyperplane(model, None, rng) for _ in range(10_000)]
    return model, cells, time.perf_counter() - t0


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report(request):
    """``report(ok, detail)`` prints one PASS/FAIL line for the calling
    criterion and fails the test when ``ok`` is false."""

    def _report(ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} {request.node.name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, detail

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
