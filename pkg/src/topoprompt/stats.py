"""Spearman rank correlation and the Mann-Whitney U test, plus a helper that
correlates every column of a metrics table with an accuracy series."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InputError, UndefinedCorrelationError

EXACT_MAX_TOTAL = 12


@dataclass(frozen=True)
class CorrelationResult:
    rho: float
    p_value: float
    n: int


@dataclass(frozen=True)
class RankTestResult:
    u: float
    p_value: float
    n_a: int
    n_b: int
    method: str = "exact"


def average_ranks(x) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(len(x))
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _series(x, name):
    arr = np.asarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite values")
    return arr


def spearman(x, y) -> CorrelationResult:
    """Pearson correlation of average ranks; two-sided p-value from
    ``t = rho sqrt((n - 2) / (1 - rho^2))`` with ``n - 2`` degrees of freedom."""
    x, y = _series(x, "x"), _series(y, "y")
    if len(x) != len(y):
        raise InputError(f"series lengths differ: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise InputError("spearman needs at least 3 observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelationError("correlation is undefined for a constant series")
    rx = average_ranks(x) - (n + 1) / 2.0
    ry = average_ranks(y) - (n + 1) / 2.0
    rho = float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))
    rho = min(1.0, max(-1.0, rho))
    if abs(rho) == 1.0:
        return CorrelationResult(rho, 0.0, n)
    dof = n - 2
    t = abs(rho) * math.sqrt(dof / (1.0 - rho * rho))
    # two-sided Student-t tail via the regularized incomplete beta function
    p = float(special.betainc(dof / 2.0, 0.5, dof / (dof + t * t)))
    return CorrelationResult(rho, min(1.0, p), n)


def u_statistic(a, b) -> float:
    """Pairs with ``a > b`` plus half the ties."""
    a = np.asarray(a, dtype=np.float64)[:, None]
    b = np.asarray(b, dtype=np.float64)[None, :]
    return float(np.sum(a > b) + 0.5 * np.sum(a == b))


def _exact_u_distribution(ranks, n_a):
    """Distribution of U for the first group over all ``C(N, n_a)`` equally
    likely rank assignments, by subset-sum counting on doubled ranks."""
    doubled = np.rint(2 * ranks).astype(int)
    top = int(doubled.sum())
    counts = np.zeros((n_a + 1, top + 1))
    counts[0, 0] = 1.0
    for r in doubled:
        counts[1:, r:] += counts[:-1, : top + 1 - r].copy()
    dist = counts[n_a]
    sums = np.flatnonzero(dist)
    u_values = sums / 2.0 - n_a * (n_a + 1) / 2.0
    # counts are integers held exactly in float64 at these sizes
    return u_values, dist[sums], float(dist.sum())


def mann_whitney_u(a, b, method: str = "auto") -> RankTestResult:
    """Two-sided Mann-Whitney test reporting U of ``a``.

    ``method="auto"`` is exact when ``len(a) + len(b) <= 12`` (ties keep
    their average ranks) and otherwise uses the normal approximation with tie
    and continuity corrections. ``"exact"`` or ``"normal"`` force one branch.
    """
    if method not in ("auto", "exact", "normal"):
        raise InputError(f"method must be 'auto', 'exact' or 'normal', got {method!r}")
    a, b = _series(a, "a"), _series(b, "b")
    n_a, n_b = len(a), len(b)
    if n_a == 0 or n_b == 0:
        raise InputError("both samples must be non-empty")
    u = u_statistic(a, b)
    mean = n_a * n_b / 2.0
    ranks = average_ranks(np.concatenate([a, b]))
    total = n_a + n_b
    if method == "exact" or (method == "auto" and total <= EXACT_MAX_TOTAL):
        u_values, counts, total_count = _exact_u_distribution(ranks, n_a)
        tol = 1e-9 * max(1.0, mean)
        p = float(counts[np.abs(u_values - mean) >= abs(u - mean) - tol].sum()) / total_count
        return RankTestResult(u, min(1.0, p), n_a, n_b, "exact")
    _, tie_sizes = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_sizes**3 - tie_sizes)) / (total * (total - 1))
    var = n_a * n_b / 12.0 * ((total + 1) - tie_term)
    if var <= 0:
        return RankTestResult(u, 1.0, n_a, n_b, "normal")
    z = max(0.0, abs(u - mean) - 0.5) / math.sqrt(var)
    p = float(special.erfc(z / math.sqrt(2.0)))
    return RankTestResult(u, min(1.0, p), n_a, n_b, "normal")


def correlate_trajectory(metrics, accuracy, columns=None) -> list:
    """Spearman and Mann-Whitney statistics of each metric column against
    ``accuracy``.

    ``metrics`` is a list of row dicts (see
    :func:`topoprompt.evolve.trajectory_metrics`). For the rank test the rows
    are split at the median accuracy: the first group holds rows with
    accuracy <= median, the second the rest, and U is reported for the
    first group. Undefined statistics are ``None`` (printed as N/A).
    """
    accuracy = _series(accuracy, "accuracy")
    if len(metrics) != len(accuracy):
        raise InputError(f"metrics has {len(metrics)} rows but accuracy has {len(accuracy)} values")
    if columns is None:
        columns = [c for c in metrics[0] if c != "step"] if metrics else []
    median = float(np.median(accuracy))
    low = accuracy <= median
    out = []
    for col in columns:
        values = np.array([float(row[col]) for row in metrics])
        row = {"metric": col, "rho": None, "rho_p": None, "U": None, "U_p": None}
        try:
            corr = spearman(values, accuracy)
            row["rho"], row["rho_p"] = corr.rho, corr.p_value
        except (UndefinedCorrelationError, InputError):
            pass
        if low.any() and (~low).any():
            test = mann_whitney_u(values[low], values[~low])
            row["U"], row["U_p"] = test.u, test.p_value
        out.append(row)
    return out


def format_report_csv(rows) -> str:
    def cell(v):
        return "N/A" if v is None else repr(float(v))

    lines = ["metric,rho,rho_p,U,U_p"]
    for r in rows:
        lines.append(",".join([r["metric"]] + [cell(r[k]) for k in ("rho", "rho_p", "U", "U_p")]))
    return "\n".join(lines) + "\n"
