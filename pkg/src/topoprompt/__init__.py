"""Persistent homology of evolving point clouds and the topological
soft-prompt loss (TSLoss)."""
from ._accel import BACKEND
from .errors import (
    CoincidentPointsError,
    DegenerateDensityError,
    DimensionError,
    DivergenceError,
    EvolutionAborted,
    GuardError,
    InputError,
    NumericError,
    SingularGradientError,
    SnapshotFormatError,
    SnapshotParseError,
    UndefinedCorrelationError,
    UndefinedEntropyError,
    ValidationError,
)
from .evolve import SGD, Adam, Anchor, EvolveConfig, TrajectoryRecord, descend, trajectory_metrics
from .homology import (
    FiltrationSimplex,
    PersistenceDiagram,
    PersistencePair,
    diagram,
    h0_persistence,
    h1_persistence,
    oracle_persistence,
    vr_filtration,
)
from .metrics import (
    TopologySummary,
    density_metrics,
    feature_counts,
    lifespan_stats,
    persistence_entropy,
    summarize,
)
from .pointcloud import DistanceMatrix, PointCloud, distance_matrix, gaussian_init, load_snapshot, write_snapshot
from .stats import CorrelationResult, RankTestResult, correlate_trajectory, mann_whitney_u, spearman
from .tsloss import (
    LossBreakdown,
    LossConfig,
    loss_h0,
    loss_h1,
    soft_quantiles,
    softmin_distances,
    ts_loss,
    ts_loss_gradient,
)

__version__ = "0.1.0"
