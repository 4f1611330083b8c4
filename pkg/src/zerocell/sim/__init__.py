"""Monte Carlo simulators for the Voronoi and hyperplane mosaics."""

from .estimate import (
    EstimateCI,
    binomial_estimate,
    estimate_probability,
    run_chunked,
    wilson_interval,
)
from .hyperplane import (
    HyperplaneRealization,
    RejectionStallError,
    WindowTooSmallError,
    sample_hyperplane_process,
    sample_typical_cell_hyperplane,
    sample_Y_hyperplane,
    sample_Y_hyperplane_batch,
    segment_hit_counts,
    zero_cell_hyperplane,
)
from .voronoi import (
    VoronoiWindowError,
    ppp_ball,
    sample_Y_voronoi,
    sample_Y_voronoi_batch,
    slivnyak_void_check,
    voronoi_cell_polytope,
    voronoi_zero_cell,
)
