"""Hot inner loops, each in a numba and a pure-numpy flavour.

The public names at the bottom dispatch on :data:`topoprompt._accel.BACKEND`.
Both flavours are always importable so the benchmark and the backend
equivalence tests can call them side by side.
"""
import numpy as np

from ._accel import BACKEND, njit

# --------------------------------------------------------------------------
# pairwise Euclidean distances
# --------------------------------------------------------------------------


@njit
def _pairwise_distances_numba(points):
    n, d = points.shape
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(d):
                diff = points[i, k] - points[j, k]
                acc += diff * diff
            r = np.sqrt(acc)
            out[i, j] = r
            out[j, i] = r
    return out


def _pairwise_distances_numpy(points):
    n, d = points.shape
    diff = points[:, None, :] - points[None, :, :]
    acc = np.zeros((n, n))
    # accumulate coordinate by coordinate so the summation order (and hence
    # every bit) matches the compiled loop
    for k in range(d):
        acc += diff[:, :, k] * diff[:, :, k]
    out = np.sqrt(acc)
    np.fill_diagonal(out, 0.0)
    return out


# --------------------------------------------------------------------------
# union-find over filtration-ordered edges (H0)
# --------------------------------------------------------------------------


@njit
def _kruskal_numba(n, src, dst, skip):
    parent = np.arange(n)
    rank = np.zeros(n, dtype=np.int64)
    is_tree = np.zeros(src.shape[0], dtype=np.bool_)
    merged = 0
    for e in range(src.shape[0]):
        if merged == n - 1:
            break
        if skip[e]:
            continue
        a = src[e]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = dst[e]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a == b:
            continue
        if rank[a] < rank[b]:
            a, b = b, a
        parent[b] = a
        if rank[a] == rank[b]:
            rank[a] += 1
        is_tree[e] = True
        merged += 1
    return is_tree


def _kruskal_numpy(n, src, dst, skip):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    is_tree = np.zeros(len(src), dtype=bool)
    merged = 0
    for e in range(len(src)):
        if merged == n - 1:
            break
        if skip[e]:
            continue
        a, b = find(int(src[e])), find(int(dst[e]))
        if a == b:
            continue
        parent[max(a, b)] = min(a, b)
        is_tree[e] = True
        merged += 1
    return is_tree


# --------------------------------------------------------------------------
# GF(2) column reduction of the edge/triangle boundary block (H1)
# --------------------------------------------------------------------------


@njit
def _reduce_columns_numba(faces, n_rows):
    """``faces[j]`` lists the row indices of column ``j``; returns the pivot
    (lowest row) of every reduced column, -1 for columns reduced to zero."""
    m, width = faces.shape
    owner = np.full(n_rows, -1, dtype=np.int64)
    low = np.full(m, -1, dtype=np.int64)
    work = np.zeros(n_rows, dtype=np.uint8)
    cap = max(16, 4 * m)
    store = np.empty(cap, dtype=np.int64)
    start = np.zeros(m, dtype=np.int64)
    length = np.zeros(m, dtype=np.int64)
    used = 0
    for j in range(m):
        pivot = -1
        for t in range(width):
            r = faces[j, t]
            work[r] ^= 1
        for t in range(width):
            r = faces[j, t]
            if work[r] and r > pivot:
                pivot = r
        while pivot >= 0 and owner[pivot] >= 0:
            k = owner[pivot]
            for t in range(start[k], start[k] + length[k]):
                work[store[t]] ^= 1
            while pivot >= 0 and work[pivot] == 0:
                pivot -= 1
        if pivot < 0:
            continue
        low[j] = pivot
        owner[pivot] = j
        count = 0
        for r in range(pivot + 1):
            if work[r]:
                count += 1
        if used + count > cap:
            while used + count > cap:
                cap *= 2
            grown = np.empty(cap, dtype=np.int64)
            grown[:used] = store[:used]
            store = grown
        start[j] = used
        length[j] = count
        for r in range(pivot + 1):
            if work[r]:
                store[used] = r
                used += 1
                work[r] = 0
    return low


def _reduce_columns_numpy(faces, n_rows):
    m = faces.shape[0]
    owner = {}
    reduced = {}
    low = np.full(m, -1, dtype=np.int64)
    for j in range(m):
        column = set()
        for r in faces[j]:
            column ^= {int(r)}
        while column:
            pivot = max(column)
            k = owner.get(pivot)
            if k is None:
                owner[pivot] = j
                reduced[j] = column
                low[j] = pivot
                break
            column ^= reduced[k]
    return low


# --------------------------------------------------------------------------
# chain rule from pairwise-distance sensitivities to point coordinates
# --------------------------------------------------------------------------


@njit
def _distance_chain_numba(points, dist, sens):
    n, d = points.shape
    grad = np.zeros((n, d))
    for i in range(n):
        for j in range(i + 1, n):
            w = (sens[i, j] + sens[j, i]) / dist[i, j]
            for k in range(d):
                g = w * (points[i, k] - points[j, k])
                grad[i, k] += g
                grad[j, k] -= g
    return grad


def _distance_chain_numpy(points, dist, sens):
    n = points.shape[0]
    off = ~np.eye(n, dtype=bool)
    weight = np.zeros((n, n))
    weight[off] = (sens + sens.T)[off] / dist[off]
    return weight.sum(axis=1)[:, None] * points - weight @ points


_IMPLS = {
    "numba": (
        _pairwise_distances_numba,
        _kruskal_numba,
        _reduce_columns_numba,
        _distance_chain_numba,
    ),
    "numpy": (
        _pairwise_distances_numpy,
        _kruskal_numpy,
        _reduce_columns_numpy,
        _distance_chain_numpy,
    ),
}


def implementations(backend):
    """Return ``(pairwise_distances, kruskal, reduce_columns, distance_chain)``."""
    return _IMPLS[backend]


pairwise_distances, kruskal, reduce_columns, distance_chain = _IMPLS[BACKEND]
