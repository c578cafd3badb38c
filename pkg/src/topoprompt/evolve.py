"""First-order descent of a point cloud on ``surrogate + L_ts`` with periodic
topological snapshots.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import CoincidentPointsError, DivergenceError, SingularGradientError, ValidationError
from .metrics import TopologySummary, summarize
from .pointcloud import PointCloud, load_snapshot, write_snapshot
from .tsloss import LossConfig, ts_loss

log = logging.getLogger(__name__)

METRIC_COLUMNS = (
    "step",
    "h0_count",
    "h1_count",
    "avg_life_h0",
    "avg_life_h1",
    "persistence_entropy",
    "h1_density",
    "nn_density",
    "ts_loss",
    "total_loss",
)

MAX_HALVINGS = 60
DEFAULT_LEARNING_RATE = {"adam": 1e-3, "sgd": 4.0}


@dataclass(frozen=True)
class Anchor:
    """Quadratic pull ``weight * ||P - target||^2`` standing in for a task loss."""

    target: PointCloud
    weight: float = 1.0

    def value_and_grad(self, X):
        diff = X - self.target.points
        return self.weight * float(np.sum(diff * diff)), 2.0 * self.weight * diff


@dataclass(frozen=True)
class SGD:
    backtracking: bool = False


@dataclass(frozen=True)
class Adam:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class EvolveConfig:
    steps: int = 300
    learning_rate: float = 1e-3
    snapshot_every: int = 20
    loss_config: LossConfig | None = None  # None: LossConfig.adaptive(initial)
    surrogate: Anchor | None = None
    optimizer: SGD | Adam = field(default_factory=Adam)
    noise_floor: float = 0.0

    def __post_init__(self):
        if self.steps < 1 or self.snapshot_every < 1:
            raise ValidationError("steps and snapshot_every must be >= 1")
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ValidationError("learning_rate must be positive")


@dataclass(frozen=True)
class TrajectoryRecord:
    step: int
    cloud: PointCloud
    total_loss: float
    ts_loss: float
    surrogate_loss: float
    summary: TopologySummary | None

    def metrics_row(self) -> dict:
        s = self.summary
        return {
            "step": self.step,
            "h0_count": s.h0_count,
            "h1_count": s.h1_count,
            "avg_life_h0": s.avg_life_h0,
            "avg_life_h1": s.avg_life_h1,
            "persistence_entropy": s.persistence_entropy,
            "h1_density": s.h1_density,
            "nn_density": s.nn_density,
            "ts_loss": self.ts_loss,
            "total_loss": self.total_loss,
        }


class _Objective:
    def __init__(self, loss_config, surrogate):
        self.loss_config = loss_config
        self.surrogate = surrogate

    def __call__(self, X):
        """Return ``(total, ts, surrogate, gradient)`` at coordinates ``X``."""
        breakdown = ts_loss(PointCloud(X), self.loss_config)
        grad = breakdown.gradient
        sur = 0.0
        if self.surrogate is not None:
            sur, sur_grad = self.surrogate.value_and_grad(X)
            grad = grad + sur_grad
        return sur + breakdown.l_ts, breakdown.l_ts, sur, grad


def _is_snapshot_step(step, config):
    return step == 0 or step == config.steps or step % config.snapshot_every == 0


def descend(initial: PointCloud, config: EvolveConfig) -> list:
    """Run ``config.steps`` optimizer iterations and return the recorded
    trajectory (step 0, every ``snapshot_every`` steps, and the last step).

    On coincident points or a non-finite loss the run stops and the raised
    :class:`~topoprompt.errors.EvolutionAborted` carries the records so far,
    ending with the last valid step.
    """
    loss_config = config.loss_config or LossConfig.adaptive(initial)
    if config.surrogate is not None and config.surrogate.target.points.shape != initial.points.shape:
        raise ValidationError("anchor target must match the cloud's shape")
    objective = _Objective(loss_config, config.surrogate)
    opt = config.optimizer

    X = initial.points.copy()
    records = []
    m = np.zeros_like(X)
    v = np.zeros_like(X)

    def record(step, coords, total, ts, sur, with_summary=True):
        cloud = PointCloud(coords)
        summary = summarize(cloud, config.noise_floor) if with_summary else None
        records.append(TrajectoryRecord(step, cloud, total, ts, sur, summary))

    def abort(exc_type, message, step, last):
        if last is not None and (not records or records[-1].step != step - 1):
            try:
                record(step - 1, *last)
            except Exception:  # diagnostic record only; geometry may be degenerate
                record(step - 1, *last, with_summary=False)
        raise exc_type(message, records)

    last = None
    for step in range(config.steps + 1):
        try:
            total, ts, sur, grad = objective(X)
        except SingularGradientError:
            abort(CoincidentPointsError, f"coincident points at step {step}", step, last)
        except ValidationError:
            # coordinates or distances overflowed
            abort(DivergenceError, f"non-finite coordinates at step {step}", step, last)
        if not (math.isfinite(total) and np.all(np.isfinite(grad))):
            abort(DivergenceError, f"non-finite loss at step {step}", step, last)
        if _is_snapshot_step(step, config):
            record(step, X, total, ts, sur)
        last = (X, total, ts, sur)
        if step == config.steps:
            break

        lr = config.learning_rate
        if isinstance(opt, Adam):
            t = step + 1
            m = opt.beta1 * m + (1 - opt.beta1) * grad
            v = opt.beta2 * v + (1 - opt.beta2) * grad * grad
            m_hat = m / (1 - opt.beta1**t)
            v_hat = v / (1 - opt.beta2**t)
            X = X - lr * m_hat / (np.sqrt(v_hat) + opt.eps)
        elif opt.backtracking:
            for _ in range(MAX_HALVINGS):
                trial = X - lr * grad
                try:
                    accepted = objective(trial)[0] < total
                except (SingularGradientError, ValidationError):
                    accepted = False
                if accepted:
                    X = trial
                    break
                lr *= 0.5
            else:
                log.debug("step %d: no decrease after %d halvings; holding position", step, MAX_HALVINGS)
        else:
            X = X - lr * grad
    return records


# --------------------------------------------------------------------------
# metrics tables and on-disk trajectories
# --------------------------------------------------------------------------


def trajectory_metrics(records) -> list:
    """One row (dict keyed by :data:`METRIC_COLUMNS`) per record."""
    if not records:
        raise ValueError("need at least one record")
    return [r.metrics_row() for r in records if r.summary is not None]


def _cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def format_metrics_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(METRIC_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_cell(row[c]) for c in METRIC_COLUMNS) + "\n")
    return buf.getvalue()


def read_metrics_csv(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for row in reader:
            rows.append({k: (int(v) if k in ("step", "h0_count", "h1_count") else float(v)) for k, v in row.items()})
    return rows


def snapshot_name(step: int) -> str:
    return f"snapshot_{step:06d}.csv"


def write_trajectory(records, outdir) -> dict:
    """Write per-record snapshot CSVs, ``manifest.json`` and ``metrics.csv``.

    Snapshot paths in the manifest are relative to ``outdir``.
    """
    os.makedirs(outdir, exist_ok=True)
    manifest = []
    for r in records:
        name = snapshot_name(r.step)
        write_snapshot(r.cloud, os.path.join(outdir, name), "csv")
        manifest.append({"step": r.step, "snapshot_path": name, "ts_loss": r.ts_loss, "total_loss": r.total_loss})
    paths = {
        "manifest": os.path.join(outdir, "manifest.json"),
        "metrics": os.path.join(outdir, "metrics.csv"),
    }
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    rows = trajectory_metrics(records)
    with open(paths["metrics"], "w", encoding="utf-8", newline="") as fh:
        fh.write(format_metrics_csv(rows))
    return paths


def load_manifest(path) -> list:
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise ValidationError("manifest must be a JSON array")
    return entries


def records_from_manifest(path, noise_floor: float = 0.0) -> list:
    """Rebuild records from a manifest, recomputing every summary."""
    base = os.path.dirname(os.path.abspath(path))
    records = []
    for entry in load_manifest(path):
        snap = os.path.join(base, entry["snapshot_path"])
        if not os.path.exists(snap):
            raise FileNotFoundError(f"snapshot for step {entry['step']} is missing: {snap}")
        cloud = load_snapshot(snap, "csv")
        ts = float(entry["ts_loss"])
        total = float(entry["total_loss"])
        records.append(TrajectoryRecord(int(entry["step"]), cloud, total, ts, total - ts, summarize(cloud, noise_floor)))
    return records
