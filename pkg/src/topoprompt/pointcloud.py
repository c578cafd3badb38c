"""Point clouds, pairwise distances, seeded Gaussian initialization and
snapshot I/O (CSV / JSON).
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, SnapshotFormatError, SnapshotParseError, ValidationError

FORMATS = ("csv", "json")


@dataclass(frozen=True, eq=False)
class PointCloud:
    """An ``n x d`` matrix of float64 coordinates, one point per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2:
            raise DimensionError(f"point cloud must be a 2-D matrix, got shape {pts.shape}")
        if pts.shape[0] < 2 or pts.shape[1] < 1:
            raise DimensionError(f"need n >= 2 points and d >= 1 coordinates, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("point cloud contains NaN or infinite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self.points.shape == other.points.shape and np.array_equal(self.points, other.points)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric, zero-diagonal matrix of Euclidean distances."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise DimensionError(f"distance matrix must be square, got shape {vals.shape}")
        if vals.shape[0] < 2:
            raise DimensionError("distance matrix needs at least 2 points")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValidationError("distances must be finite and non-negative")
        if np.any(np.diag(vals) != 0) or not np.array_equal(vals, vals.T):
            raise ValidationError("distance matrix must be symmetric with a zero diagonal")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.values.max())

    def off_diagonal(self) -> np.ndarray:
        """Distances of all ordered pairs ``i != j`` (row-major)."""
        n = self.n
        return self.values[~np.eye(n, dtype=bool)]


def as_distance_array(D) -> np.ndarray:
    """Accept a :class:`DistanceMatrix` or anything array-like."""
    if isinstance(D, DistanceMatrix):
        return D.values
    return DistanceMatrix(D).values


def _uniform53(raw: np.ndarray) -> np.ndarray:
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def gaussian_init(n: int, d: int, sigma: float = 0.02, seed: int = 0) -> PointCloud:
    """Draw an ``n x d`` cloud with i.i.d. ``N(0, sigma^2)`` entries.

    Uniforms come from the raw 64-bit output of numpy's PCG64 bit generator
    (seeded through ``SeedSequence(seed)``), taking the top 53 bits. Pairs of
    uniforms ``(u1, u2)`` are mapped by the Box-Muller transform
    ``sqrt(-2 ln(1 - u1)) * (cos 2 pi u2, sin 2 pi u2)``, filled row-major.
    Neither step depends on numpy's sampler implementations, which are not
    stream-stable across releases.
    """
    if int(n) != n or int(d) != d or n < 2 or d < 1:
        raise DimensionError(f"need integer n >= 2 and d >= 1, got n={n}, d={d}")
    if not (sigma >= 0 and math.isfinite(sigma)):
        raise ValidationError(f"sigma must be a finite non-negative number, got {sigma}")
    n, d = int(n), int(d)
    total = n * d
    pairs = (total + 1) // 2
    raw = np.random.PCG64(seed).random_raw(2 * pairs)
    u = _uniform53(raw).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    z = np.empty((pairs, 2))
    z[:, 0] = radius * np.cos(angle)
    z[:, 1] = radius * np.sin(angle)
    return PointCloud(sigma * z.reshape(-1)[:total].reshape(n, d))


def distance_matrix(cloud: PointCloud) -> DistanceMatrix:
    pts = cloud.points if isinstance(cloud, PointCloud) else PointCloud(cloud).points
    return DistanceMatrix(kernels.pairwise_distances(np.ascontiguousarray(pts)))


def _infer_format(path, fmt):
    if fmt is None:
        ext = os.path.splitext(str(path))[1].lower().lstrip(".")
        fmt = ext if ext in FORMATS else "csv"
    if fmt not in FORMATS:
        raise ValidationError(f"unknown snapshot format {fmt!r}; expected one of {FORMATS}")
    return fmt


def _parse_csv(text: str, header: bool):
    rows = []
    width = None
    for lineno, fields in enumerate(csv.reader(text.splitlines()), start=1):
        if header and lineno == 1:
            continue
        if not fields or all(not f.strip() for f in fields):
            continue
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise SnapshotFormatError(
                f"ragged row: expected {width} values, found {len(fields)}", row=lineno
            )
        row = []
        for col, token in enumerate(fields, start=1):
            try:
                row.append(float(token))
            except ValueError:
                raise SnapshotParseError(f"non-numeric token {token.strip()!r}", row=lineno, column=col) from None
        rows.append(row)
    return rows


def _parse_json(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SnapshotParseError(f"invalid JSON: {exc.msg}", row=exc.lineno, column=exc.colno) from None
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise SnapshotFormatError("JSON snapshot must be an array of arrays")
    width = None
    for i, row in enumerate(data, start=1):
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SnapshotFormatError(f"ragged row: expected {width} values, found {len(row)}", row=i)
        for j, v in enumerate(row, start=1):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise SnapshotParseError(f"non-numeric value {v!r}", row=i, column=j)
    return data


def load_snapshot(path, format: str | None = None, header: bool = False) -> PointCloud:
    """Read a cloud written by :func:`write_snapshot` (or any compatible dump).

    ``format`` defaults to the file extension, then CSV. ``header=True`` skips
    the first CSV line.
    """
    fmt = _infer_format(path, format)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    rows = _parse_csv(text, header) if fmt == "csv" else _parse_json(text)
    if len(rows) < 2:
        raise DimensionError(f"snapshot has {len(rows)} point(s); at least 2 are required")
    if not rows[0]:
        raise DimensionError("snapshot rows are empty")
    return PointCloud(np.array(rows, dtype=np.float64))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_snapshot(cloud: PointCloud, format: str = "csv") -> str:
    if format == "csv":
        return "".join(",".join(_fmt(v) for v in row) + "\n" for row in cloud.points)
    if format == "json":
        body = ",\n ".join("[" + ", ".join(_fmt(v) for v in row) + "]" for row in cloud.points)
        return "[" + body + "]\n"
    raise ValueError(f"unknown snapshot format {format!r}; expected one of {FORMATS}")


def write_snapshot(cloud: PointCloud, path, format: str | None = None) -> None:
    if not str(path):
        raise OSError("snapshot path is empty")
    fmt = _infer_format(path, format)
    text = format_snapshot(cloud, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def pca_project(cloud: PointCloud, components: int = 2) -> np.ndarray:
    """Coordinates on the leading principal axes (exact eigendecomposition of
    the covariance). Each axis is signed so its largest-magnitude loading is
    positive; missing axes (``d < components``) are zero-filled."""
    X = cloud.points - cloud.points.mean(axis=0)
    cov = X.T @ X / max(cloud.n - 1, 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals, kind="stable")[::-1][:components]
    axes = evecs[:, order]
    flip = np.sign(axes[np.argmax(np.abs(axes), axis=0), np.arange(axes.shape[1])])
    axes = axes * np.where(flip == 0, 1.0, flip)
    out = np.zeros((cloud.n, components))
    out[:, : axes.shape[1]] = X @ axes
    return out
