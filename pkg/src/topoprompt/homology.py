"""Vietoris-Rips persistent homology in dimensions 0 and 1.

Simplices are ordered by ``(value, dimension, vertices)``. H0 comes from
union-find over the edges; H1 from GF(2) column reduction of the
triangle-to-edge boundary block. The edge-to-vertex block is reduced second,
and edges already paired with a triangle are cleared (skipped) there.
:func:`oracle_persistence` is a deliberately naive dense reduction used to
cross-check the fast path.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import GuardError, SnapshotFormatError, SnapshotParseError
from .pointcloud import PointCloud, as_distance_array, distance_matrix

ZERO_PERSISTENCE_RTOL = 1e-12
ORACLE_MAX_POINTS = 12


@dataclass(frozen=True)
class FiltrationSimplex:
    vertices: tuple
    value: float

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def sort_key(self):
        return (self.value, self.dim, self.vertices)


class PersistencePair(NamedTuple):
    dim: int
    birth: float
    death: float

    @property
    def lifespan(self) -> float:
        return self.death - self.birth

    @property
    def is_essential(self) -> bool:
        return math.isinf(self.death)


@dataclass
class PersistenceDiagram:
    pairs: list = field(default_factory=list)

    def __post_init__(self):
        self.pairs = sorted(PersistencePair(int(p[0]), float(p[1]), float(p[2])) for p in self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def in_dim(self, dim: int) -> list:
        return [p for p in self.pairs if p.dim == dim]

    def finite(self, dim: int | None = None) -> list:
        return [p for p in self.pairs if not p.is_essential and (dim is None or p.dim == dim)]

    def lifespans(self, dim: int | None = None) -> np.ndarray:
        return np.array([p.lifespan for p in self.finite(dim)], dtype=np.float64)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("dim,birth,death\n")
        for p in self.pairs:
            death = "inf" if p.is_essential else repr(p.death)
            buf.write(f"{p.dim},{p.birth!r},{death}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PersistenceDiagram":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or [h.strip() for h in lines[0].split(",")] != ["dim", "birth", "death"]:
            raise SnapshotFormatError("diagram CSV must start with the header 'dim,birth,death'", row=1)
        pairs = []
        for lineno, fields in enumerate(csv.reader(lines[1:]), start=2):
            if len(fields) != 3:
                raise SnapshotFormatError(f"expected 3 fields, found {len(fields)}", row=lineno)
            try:
                dim = int(fields[0])
            except ValueError:
                raise SnapshotParseError(f"bad dimension {fields[0]!r}", row=lineno, column=1) from None
            vals = []
            for col, tok in enumerate(fields[1:], start=2):
                try:
                    vals.append(float(tok))
                except ValueError:
                    raise SnapshotParseError(f"non-numeric token {tok!r}", row=lineno, column=col) from None
            pairs.append((dim, vals[0], vals[1]))
        return cls(pairs)


# --------------------------------------------------------------------------
# filtration
# --------------------------------------------------------------------------


def _sorted_edges(D: np.ndarray):
    n = D.shape[0]
    src, dst = np.triu_indices(n, k=1)
    w = D[src, dst]
    order = np.lexsort((dst, src, w))
    return src[order], dst[order], w[order]


def _sorted_triangles(D: np.ndarray, edge_rank: np.ndarray):
    """Triangles in filtration order and their faces as edge ranks."""
    n = D.shape[0]
    tri = np.array(list(combinations(range(n), 3)), dtype=np.int64).reshape(-1, 3)
    i, j, k = tri[:, 0], tri[:, 1], tri[:, 2]
    value = np.maximum(np.maximum(D[i, j], D[i, k]), D[j, k])
    order = np.lexsort((k, j, i, value))
    tri, value = tri[order], value[order]
    i, j, k = tri[:, 0], tri[:, 1], tri[:, 2]
    faces = np.stack([edge_rank[i, j], edge_rank[i, k], edge_rank[j, k]], axis=1)
    return tri, value, np.ascontiguousarray(faces)


def vr_filtration(D, max_dim: int = 2) -> list:
    """All vertices, edges and (for ``max_dim=2``) triangles, in filtration order.

    A simplex's value is the largest pairwise distance among its vertices.
    """
    if max_dim not in (1, 2):
        raise ValueError(f"max_dim must be 1 or 2, got {max_dim}")
    D = as_distance_array(D)
    n = D.shape[0]
    out = [FiltrationSimplex((v,), 0.0) for v in range(n)]
    src, dst, w = _sorted_edges(D)
    out += [FiltrationSimplex((int(a), int(b)), float(x)) for a, b, x in zip(src, dst, w)]
    if max_dim == 2:
        rank = np.zeros((n, n), dtype=np.int64)
        rank[src, dst] = np.arange(len(src))
        tri, value, _ = _sorted_triangles(D, rank)
        out += [FiltrationSimplex(tuple(int(v) for v in t), float(x)) for t, x in zip(tri, value)]
    out.sort(key=FiltrationSimplex.sort_key)
    return out


# --------------------------------------------------------------------------
# fast path
# --------------------------------------------------------------------------


def _h1_from_reduction(D: np.ndarray):
    """Reduce the triangle columns; return H1 pairs and the paired-edge mask."""
    n = D.shape[0]
    src, dst, w = _sorted_edges(D)
    paired = np.zeros(len(w), dtype=bool)
    if n < 3:
        return [], (src, dst, w), paired
    rank = np.zeros((n, n), dtype=np.int64)
    rank[src, dst] = np.arange(len(w))
    _, tri_value, faces = _sorted_triangles(D, rank)
    low = kernels.reduce_columns(faces, len(w))
    eps = ZERO_PERSISTENCE_RTOL * float(D.max())
    pairs = []
    for j in np.flatnonzero(low >= 0):
        edge = low[j]
        paired[edge] = True
        birth, death = float(w[edge]), float(tri_value[j])
        if death - birth > eps:
            pairs.append(PersistencePair(1, birth, death))
    return pairs, (src, dst, w), paired


def _h0_from_edges(n, edges, skip):
    src, dst, w = edges
    is_tree = kernels.kruskal(n, src, dst, skip)
    pairs = [PersistencePair(0, 0.0, float(x)) for x in w[is_tree]]
    pairs.append(PersistencePair(0, 0.0, math.inf))
    return pairs


def h0_persistence(D) -> list:
    """``n - 1`` finite pairs at the minimum-spanning-tree edge weights, plus
    the essential ``(0, inf)`` class."""
    D = as_distance_array(D)
    edges = _sorted_edges(D)
    pairs = _h0_from_edges(D.shape[0], edges, np.zeros(len(edges[2]), dtype=bool))
    return sorted(pairs)


def h1_persistence(D) -> list:
    D = as_distance_array(D)
    pairs, _, _ = _h1_from_reduction(D)
    return sorted(pairs)


def persistence(D) -> PersistenceDiagram:
    """Full H0 + H1 diagram of a distance matrix."""
    D = as_distance_array(D)
    h1, edges, paired = _h1_from_reduction(D)
    h0 = _h0_from_edges(D.shape[0], edges, paired)
    return PersistenceDiagram(h0 + h1)


def diagram(cloud: PointCloud) -> PersistenceDiagram:
    return persistence(distance_matrix(cloud))


# --------------------------------------------------------------------------
# oracle
# --------------------------------------------------------------------------


def oracle_persistence(D) -> PersistenceDiagram:
    """Dense, unoptimized boundary-matrix reduction over GF(2).

    Builds the full boundary matrix of every vertex, edge and triangle and
    reduces it left to right with no clearing or other shortcuts.
    """
    D = as_distance_array(D)
    n = D.shape[0]
    if n > ORACLE_MAX_POINTS:
        raise GuardError(f"oracle limited to n <= {ORACLE_MAX_POINTS} points, got {n}")
    simplices = [((v,), 0.0) for v in range(n)]
    for a, b in combinations(range(n), 2):
        simplices.append(((a, b), float(D[a, b])))
    for a, b, c in combinations(range(n), 3):
        simplices.append(((a, b, c), float(max(D[a, b], D[a, c], D[b, c]))))
    simplices.sort(key=lambda s: (s[1], len(s[0]), s[0]))
    index = {verts: i for i, (verts, _) in enumerate(simplices)}

    size = len(simplices)
    matrix = np.zeros((size, size), dtype=np.uint8)
    for col, (verts, _) in enumerate(simplices):
        if len(verts) > 1:
            for face in combinations(verts, len(verts) - 1):
                matrix[index[face], col] = 1

    def lowest(col):
        rows = np.flatnonzero(matrix[:, col])
        return int(rows[-1]) if len(rows) else -1

    pivot_owner = {}
    for col in range(size):
        low = lowest(col)
        while low >= 0 and low in pivot_owner:
            matrix[:, col] ^= matrix[:, pivot_owner[low]]
            low = lowest(col)
        if low >= 0:
            pivot_owner[low] = col

    eps = ZERO_PERSISTENCE_RTOL * float(D.max())
    pairs = []
    killed = set()
    for low, col in pivot_owner.items():
        killed.add(low)
        verts, birth = simplices[low]
        death = simplices[col][1]
        dim = len(verts) - 1
        if dim == 0 or death - birth > eps:
            pairs.append((dim, birth, death))
    for i, (verts, birth) in enumerate(simplices):
        # positive simplices never killed are essential classes
        if len(verts) <= 2 and i not in killed and lowest(i) < 0:
            pairs.append((len(verts) - 1, birth, math.inf))
    return PersistenceDiagram(pairs)
