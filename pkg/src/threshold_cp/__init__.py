"""Threshold-two contact process on random regular graphs."""

__version__ = "0.1.0"

from .graph_gen import (  # noqa: E402
    GraphConfig,
    HalfEdgePairing,
    RegularGraph,
    SamplingError,
    read_graph,
    sample_pairing,
    sample_simple_regular,
    write_graph,
)
from .dynamics import OccupancyState, ProcessParams, TrajectoryRecord, run, step  # noqa: E402
from .isoperimetry import SubsetStats, VacancyStats, star_sets, subset_stats, vacancy_stats  # noqa: E402

__all__ = [
    "GraphConfig",
    "HalfEdgePairing",
    "RegularGraph",
    "SamplingError",
    "read_graph",
    "sample_pairing",
    "sample_simple_regular",
    "write_graph",
    "OccupancyState",
    "ProcessParams",
    "TrajectoryRecord",
    "run",
    "step",
    "SubsetStats",
    "VacancyStats",
    "star_sets",
    "subset_stats",
    "vacancy_stats",
]
