"""Slow, independent reference computations used only by the tests."""
import itertools
import math

import numpy as np


def pair_distance(p, q):
    return math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(p, q)))


def kruskal_weights(points):
    """MST edge weights by a from-scratch Kruskal on Python floats."""
    n = len(points)
    edges = sorted((pair_distance(points[i], points[j]), i, j) for i in range(n) for j in range(i + 1, n))
    leader = {i: i for i in range(n)}
    members = {i: [i] for i in range(n)}
    out = []
    for w, i, j in edges:
        a, b = leader[i], leader[j]
        if a == b:
            continue
        if len(members[a]) < len(members[b]):
            a, b = b, a
        for v in members.pop(b):
            leader[v] = a
            members[a].append(v)
        out.append(w)
    return sorted(out)


def ts_loss_scalar(points, tau, alpha, lambda_ts=1.0, beta_h0=1.0, beta_h1=1.0, lambda_repel=1.0, lambda_attract=1.0):
    """Straight loop evaluation of the loss, no vectorization or stabilization."""
    n = len(points)
    D = [[pair_distance(points[i], points[j]) for j in range(n)] for i in range(n)]
    s = []
    for i in range(n):
        s.append(-tau * math.log(sum(math.exp(-D[i][j] / tau) for j in range(n) if j != i)))
    s_bar = sum(s) / n
    l_h0 = sum((v - s_bar) ** 2 for v in s) / n
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    z_low = sum(math.exp(-alpha * D[i][j]) for i, j in pairs)
    z_high = sum(math.exp(alpha * D[i][j]) for i, j in pairs)
    delta = sum(math.exp(-alpha * D[i][j]) / z_low * D[i][j] for i, j in pairs)
    zeta = sum(math.exp(alpha * D[i][j]) / z_high * D[i][j] for i, j in pairs)
    l_h1 = 0.0
    for i, j in pairs:
        l_h1 += lambda_repel * max(0.0, delta - D[i][j]) ** 2 + lambda_attract * max(0.0, D[i][j] - zeta) ** 2
    l_h1 /= n * n
    return {
        "s": s,
        "delta": delta,
        "zeta": zeta,
        "l_h0": l_h0,
        "l_h1": l_h1,
        "l_ts": lambda_ts * (beta_h0 * l_h0 + beta_h1 * l_h1),
    }


def central_difference(func, X, h):
    X = np.array(X, dtype=np.float64)
    grad = np.zeros_like(X)
    for idx in np.ndindex(*X.shape):
        plus = X.copy()
        minus = X.copy()
        plus[idx] += h
        minus[idx] -= h
        grad[idx] = (func(plus) - func(minus)) / (2 * h)
    return grad


def relative_gradient_error(analytic, numeric):
    """``max|analytic - numeric| / max|numeric|``; absolute when the numeric
    gradient vanishes."""
    err = float(np.abs(analytic - numeric).max())
    scale = float(np.abs(numeric).max())
    return err / scale if scale > 0 else err


def mann_whitney_exact_enumeration(a, b):
    """Two-sided exact p by listing every assignment of the pooled values to
    the first group."""
    pooled = list(a) + list(b)
    n_a = len(a)

    def u_of(group_idx):
        chosen = set(group_idx)
        first = [pooled[i] for i in chosen]
        second = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        return sum((x > y) + 0.5 * (x == y) for x in first for y in second)

    u_obs = u_of(range(n_a))
    mean = n_a * len(b) / 2
    all_u = [u_of(c) for c in itertools.combinations(range(len(pooled)), n_a)]
    hits = sum(1 for u in all_u if abs(u - mean) >= abs(u_obs - mean) - 1e-9)
    return u_obs, hits / len(all_u)


def regular_simplex(n):
    """``n`` points pairwise at distance 1 (scaled standard basis of R^n)."""
    return np.eye(n) / math.sqrt(2.0)


def circle(n, radius=1.0):
    ang = 2 * np.pi * np.arange(n) / n
    return radius * np.c_[np.cos(ang), np.sin(ang)]
