"""Distances between two-parameter persistence modules along monotone paths."""

from .bifiltration import (
    BiGrade,
    Bifiltration,
    GradedSimplex,
    PointCloud,
    build_codensity_values,
    build_function_rips,
    parse_bifiltration,
    parse_point_cloud,
    serialize_bifiltration,
)
from .distances import DIAGONAL, MatchingCert, bottleneck, scale_diagram, wasserstein
from .path import (
    MonotonePath,
    SearchSpace,
    admissible_next_points,
    entry_value,
    point_at,
    sample_initial_point,
    segment_weight,
)
from .persistence import PersistenceDiagram, compute_diagrams
from .search import (
    QTable,
    QueryConfig,
    SearchResult,
    ensemble_search,
    greedy_search,
    matching_distance_approx,
    qlearn_search,
    query_distance,
    slice_family,
)
from .slicer import ScalarFiltration, slice_bifiltration

__version__ = "0.1.0"
