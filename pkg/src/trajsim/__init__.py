"""Trajectory similarity: Fréchet-type distances with time windows, geometric
edit distances on cell strings, Jaccard shingles and k-gather clustering."""

from . import _backend
from .core import (
    ConfigurationError,
    DomainError,
    GridDecomposition,
    LocationMetric,
    ParseError,
    Point,
    PolyCurve,
    PolygonDecomposition,
    SizeGuardError,
    SpeedModel,
    SymbolTrajectory,
    TimedTrajectory,
    TrajsimError,
    ValidationError,
    load_dataset,
    load_metric,
    load_timed_trajectory,
    map_to_string,
    validate_metric,
)
from .editdist import (
    edit_graph_distance,
    insertion_first_edit_distance,
    metric_edit_distance,
    plain_edit_distance,
    seq_delete_cost,
)
from .frechet import discrete_frechet, frechet_decision, frechet_distance, free_space_diagram
from .kgather import (
    DistanceMatrix,
    MeasureConfig,
    kgather_approx,
    kgather_exact,
    kgather_exact_feasible,
    kgather_feasible,
    max_flow,
    pairwise_distances,
)
from .shingles import jaccard_distance, shingle_set
from .timewindow import (
    dtw,
    tw_discrete_frechet,
    tw_dtw,
    tw_frechet_decision,
    tw_frechet_distance,
    valid_pairs_varying_speed,
)

__version__ = "0.1.0"
BACKEND = _backend.name
