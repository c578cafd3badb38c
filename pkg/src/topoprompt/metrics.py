"""Scalar summaries of a persistence diagram."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateDensityError, UndefinedEntropyError
from .homology import PersistenceDiagram, diagram
from .pointcloud import PointCloud, distance_matrix


@dataclass(frozen=True)
class TopologySummary:
    h0_count: int
    h1_count: int
    avg_life_h0: float
    avg_life_h1: float
    max_life: float
    persistence_entropy: float  # nats, finite H0 and H1 bars pooled
    h1_density: float
    nn_density: float
    entropy_h0: float | None = None
    entropy_h1: float | None = None

    def to_dict(self, step: int | None = None) -> dict:
        out = asdict(self)
        if step is not None:
            out = {"step": step, **out}
        return out


def _entropy(lifespans: np.ndarray) -> float:
    if lifespans.size == 0:
        raise UndefinedEntropyError("persistence entropy needs at least one finite pair")
    total = lifespans.sum()
    if total <= 0:
        raise UndefinedEntropyError("total lifespan is zero")
    p = lifespans[lifespans > 0] / total
    return float(max(0.0, -np.sum(p * np.log(p))))


def persistence_entropy(dgm: PersistenceDiagram, dim: int | None = None) -> float:
    """Shannon entropy (natural log) of the normalized finite lifespans.

    The essential H0 class is excluded. ``dim=None`` pools both dimensions.
    """
    return _entropy(dgm.lifespans(dim))


def lifespan_stats(dgm: PersistenceDiagram, dim: int) -> tuple:
    """``(mean, max)`` finite lifespan in ``dim``; ``(0.0, 0.0)`` if none."""
    life = dgm.lifespans(dim)
    if life.size == 0:
        return 0.0, 0.0
    return float(life.mean()), float(life.max())


def feature_counts(dgm: PersistenceDiagram, noise_floor: float = 0.0, diameter: float | None = None) -> tuple:
    """``(|H0|, |H1|)``; H1 bars no longer than ``noise_floor * diameter`` are
    not counted. ``diameter`` defaults to the largest finite death."""
    if not 0 <= noise_floor < 1:
        raise ValueError(f"noise_floor must lie in [0, 1), got {noise_floor}")
    if diameter is None:
        finite = [p.death for p in dgm.finite()]
        diameter = max(finite) if finite else 0.0
    h0 = len(dgm.in_dim(0))
    h1 = int(np.sum(dgm.lifespans(1) > noise_floor * diameter))
    return h0, h1


def nearest_neighbor_distances(cloud: PointCloud) -> np.ndarray:
    D = distance_matrix(cloud).values.copy()
    np.fill_diagonal(D, np.inf)
    return D.min(axis=1)


def density_metrics(cloud: PointCloud, dgm: PersistenceDiagram) -> tuple:
    """``(h1_density, nn_density)``: H1 bars per point, and the reciprocal of
    the mean exact nearest-neighbor distance."""
    mean_nn = float(nearest_neighbor_distances(cloud).mean())
    if mean_nn == 0:
        raise DegenerateDensityError("mean nearest-neighbor distance is zero (coincident points)")
    _, h1 = feature_counts(dgm, 0.0)
    return h1 / cloud.n, 1.0 / mean_nn


def summarize(cloud: PointCloud, noise_floor: float = 0.0) -> TopologySummary:
    dgm = diagram(cloud)
    diameter = distance_matrix(cloud).diameter
    h0, h1 = feature_counts(dgm, noise_floor, diameter=diameter)
    avg0, max0 = lifespan_stats(dgm, 0)
    avg1, max1 = lifespan_stats(dgm, 1)
    h1_density, nn_density = density_metrics(cloud, dgm)
    per_dim = {}
    for dim in (0, 1):
        life = dgm.lifespans(dim)
        per_dim[dim] = _entropy(life) if life.sum() > 0 else None
    return TopologySummary(
        h0_count=h0,
        h1_count=h1,
        avg_life_h0=avg0,
        avg_life_h1=avg1,
        max_life=max(max0, max1),
        persistence_entropy=persistence_entropy(dgm),
        h1_density=h1_density,
        nn_density=nn_density,
        entropy_h0=per_dim[0],
        entropy_h1=per_dim[1],
    )
