"""Topological soft-prompt loss and its exact gradient.

For pairwise distances ``D`` (self-pairs excluded throughout)::

    s_i   = -tau * log sum_{j != i} exp(-D_ij / tau)          soft NN distance
    L_H0  = mean_i (s_i - mean(s))^2
    delta = sum_{i != j} softmax(-alpha D)_ij D_ij              soft low quantile
    zeta  = sum_{i != j} softmax(+alpha D)_ij D_ij              soft high quantile
    L_H1  = 1/n^2 sum_{i != j} [ l_rep max(0, delta - D_ij)^2
                                + l_att max(0, D_ij - zeta)^2 ]
    L_ts  = lambda_ts * (beta_h0 L_H0 + beta_h1 L_H1)

The gradient is differentiated through ``s``, ``delta`` and ``zeta`` (no
stop-gradients), assembled as ``dL/dD`` and pushed to coordinates via
``dD_ij/dx_i = (x_i - x_j) / D_ij``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import kernels
from .errors import SingularGradientError, ValidationError
from .pointcloud import PointCloud, as_distance_array, distance_matrix

TAU_NN_FRACTION = 0.1
ALPHA_SCALE = 10.0


@dataclass(frozen=True)
class LossConfig:
    tau: float
    alpha: float
    lambda_ts: float = 1.0
    beta_h0: float = 1.0
    beta_h1: float = 1.0
    lambda_repel: float = 1.0
    lambda_attract: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}")
        if self.tau <= 0 or self.alpha <= 0:
            raise ValidationError(f"tau and alpha must be positive, got tau={self.tau}, alpha={self.alpha}")
        for name in ("lambda_ts", "beta_h0", "beta_h1", "lambda_repel", "lambda_attract"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")

    @classmethod
    def adaptive(cls, cloud: PointCloud, **overrides) -> "LossConfig":
        """Scale-aware defaults for ``cloud``.

        ``tau`` is a tenth of the mean nearest-neighbor distance and ``alpha``
        is ten over the mean pairwise distance. Keyword arguments set to
        ``None`` are ignored.
        """
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if "tau" not in overrides or "alpha" not in overrides:
            D = distance_matrix(cloud)
            off = D.off_diagonal()
            masked = D.values + np.diag(np.full(D.n, np.inf))
            mean_nn = float(masked.min(axis=1).mean())
            if mean_nn <= 0:
                raise ValidationError("cannot derive tau: the cloud has coincident points")
            overrides.setdefault("tau", TAU_NN_FRACTION * mean_nn)
            overrides.setdefault("alpha", ALPHA_SCALE / float(off.mean()))
        return cls(**overrides)

    def with_(self, **changes) -> "LossConfig":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class LossBreakdown:
    s: np.ndarray
    s_bar: float
    delta: float
    zeta: float
    l_h0: float
    l_h1: float
    l_ts: float
    gradient: np.ndarray | None = None

    def to_dict(self, include_gradient: bool = False) -> dict:
        out = {
            "s": [float(v) for v in self.s],
            "s_bar": self.s_bar,
            "delta": self.delta,
            "zeta": self.zeta,
            "l_h0": self.l_h0,
            "l_h1": self.l_h1,
            "l_ts": self.l_ts,
        }
        if include_gradient and self.gradient is not None:
            out["gradient"] = [[float(v) for v in row] for row in self.gradient]
        return out


def _offdiag_mask(n):
    return ~np.eye(n, dtype=bool)


def _softmin_with_weights(D: np.ndarray, tau: float):
    n = D.shape[0]
    masked = D + np.diag(np.full(n, np.inf))
    m = masked.min(axis=1)
    e = np.exp(-(masked - m[:, None]) / tau)
    z = e.sum(axis=1)
    s = m - tau * np.log(z)
    return s, e / z[:, None]


def softmin_distances(D, tau: float) -> np.ndarray:
    """Soft nearest-neighbor distance of every point (stable log-sum-exp)."""
    if not tau > 0:
        raise ValidationError("tau must be positive")
    s, _ = _softmin_with_weights(as_distance_array(D), tau)
    return s


def loss_h0(s) -> float:
    """Population variance of the soft nearest-neighbor distances."""
    s = np.asarray(s, dtype=np.float64)
    return float(np.mean((s - s.mean()) ** 2))


def _soft_quantile_weights(D: np.ndarray, alpha: float):
    n = D.shape[0]
    off = _offdiag_mask(n)
    x = D[off]
    low = np.exp(-alpha * (x - x.min()))
    high = np.exp(alpha * (x - x.max()))
    w_low = np.zeros((n, n))
    w_high = np.zeros((n, n))
    w_low[off] = low / low.sum()
    w_high[off] = high / high.sum()
    return w_low, w_high


def soft_quantiles(D, alpha: float) -> tuple:
    """Exponentially weighted low/high averages ``(delta, zeta)`` of the
    off-diagonal distances."""
    if not alpha > 0:
        raise ValidationError("alpha must be positive")
    D = as_distance_array(D)
    w_low, w_high = _soft_quantile_weights(D, alpha)
    return float(np.sum(w_low * D)), float(np.sum(w_high * D))


def loss_h1(D, delta: float, zeta: float, lambda_repel: float = 1.0, lambda_attract: float = 1.0) -> float:
    D = as_distance_array(D)
    n = D.shape[0]
    x = D[_offdiag_mask(n)]
    repel = np.maximum(0.0, delta - x)
    attract = np.maximum(0.0, x - zeta)
    return float((lambda_repel * np.sum(repel**2) + lambda_attract * np.sum(attract**2)) / n**2)


def _forward(D: np.ndarray, config: LossConfig):
    s, p = _softmin_with_weights(D, config.tau)
    w_low, w_high = _soft_quantile_weights(D, config.alpha)
    delta = float(np.sum(w_low * D))
    zeta = float(np.sum(w_high * D))
    l_h0 = loss_h0(s)
    l_h1 = loss_h1(D, delta, zeta, config.lambda_repel, config.lambda_attract)
    l_ts = config.lambda_ts * (config.beta_h0 * l_h0 + config.beta_h1 * l_h1)
    return s, p, w_low, w_high, delta, zeta, l_h0, l_h1, l_ts


def ts_loss_value(cloud: PointCloud, config: LossConfig) -> float:
    """``L_ts`` alone, without the gradient."""
    return _forward(distance_matrix(cloud).values, config)[-1]


def _distance_sensitivity(D, config, s, p, w_low, w_high, delta, zeta):
    """``dL_ts / dD_ij`` with every ordered pair treated as its own variable."""
    n = D.shape[0]
    off = _offdiag_mask(n)
    c = config

    # L_H0 through the softmin; d s_i / d D_ij = p_ij
    g = (2.0 / n) * (s - s.mean())
    sens_h0 = g[:, None] * p

    repel = np.where(off, np.maximum(0.0, delta - D), 0.0)
    attract = np.where(off, np.maximum(0.0, D - zeta), 0.0)
    direct = (2.0 / n**2) * (c.lambda_attract * attract - c.lambda_repel * repel)
    dl_ddelta = (2.0 / n**2) * c.lambda_repel * repel.sum()
    dl_dzeta = -(2.0 / n**2) * c.lambda_attract * attract.sum()
    # d delta / d D_kl = w_low (1 - alpha (D_kl - delta)); likewise for zeta with +alpha
    ddelta = w_low * (1.0 - c.alpha * (D - delta))
    dzeta = w_high * (1.0 + c.alpha * (D - zeta))
    sens_h1 = direct + dl_ddelta * ddelta + dl_dzeta * dzeta

    sens = c.lambda_ts * (c.beta_h0 * sens_h0 + c.beta_h1 * sens_h1)
    sens[~off] = 0.0
    return sens


def ts_loss(cloud: PointCloud, config: LossConfig) -> LossBreakdown:
    X = cloud.points
    D = distance_matrix(cloud).values
    s, p, w_low, w_high, delta, zeta, l_h0, l_h1, l_ts = _forward(D, config)
    if config.lambda_ts == 0:
        gradient = np.zeros_like(X)
    else:
        if np.any(D[_offdiag_mask(D.shape[0])] == 0):
            raise SingularGradientError("coincident points: distance gradient is undefined")
        sens = _distance_sensitivity(D, config, s, p, w_low, w_high, delta, zeta)
        gradient = kernels.distance_chain(np.ascontiguousarray(X), D, sens)
    return LossBreakdown(
        s=s,
        s_bar=float(s.mean()),
        delta=delta,
        zeta=zeta,
        l_h0=l_h0,
        l_h1=l_h1,
        l_ts=l_ts,
        gradient=gradient,
    )


def ts_loss_gradient(cloud: PointCloud, config: LossConfig) -> np.ndarray:
    return ts_loss(cloud, config).gradient
