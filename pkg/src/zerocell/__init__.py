"""Norm laws of uniform points in centered zero cells of Poisson-Voronoi and
Poisson hyperplane mosaics, with Monte Carlo validation."""

from .hyplaw import HyperplaneModel
from .vorlaw import VoronoiModel

__version__ = "0.1.0"

__all__ = ["HyperplaneModel", "VoronoiModel", "__version__"]
