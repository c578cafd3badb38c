"""The numba and numpy kernels must agree bit for bit."""
import os
import subprocess
import sys

import numpy as np
import pytest

from topoprompt import kernels
from topoprompt._accel import HAVE_NUMBA, _resolve_backend
from topoprompt.homology import _sorted_edges, _sorted_triangles

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")

FAST = kernels.implementations("numba")
SLOW = kernels.implementations("numpy")


@pytest.mark.parametrize("shape", [(2, 1), (9, 3), (40, 16)])
def test_pairwise_distances(rng, shape):
    pts = rng.normal(size=shape)
    assert FAST[0](pts).tobytes() == SLOW[0](pts).tobytes()


def edge_and_triangle_data(rng, n):
    pts = np.round(rng.normal(size=(n, 2)), 1)  # rounding creates ties
    D = SLOW[0](pts)
    src, dst, w = _sorted_edges(D)
    rank = np.zeros((n, n), dtype=np.int64)
    rank[src, dst] = np.arange(len(w))
    _, _, faces = _sorted_triangles(D, rank)
    return src, dst, w, faces


@pytest.mark.parametrize("n", [3, 8, 25])
def test_kruskal(rng, n):
    src, dst, w, _ = edge_and_triangle_data(rng, n)
    skip = rng.uniform(size=len(w)) < 0.2
    for mask in (np.zeros_like(skip), skip):
        a = FAST[1](n, src, dst, mask)
        assert np.array_equal(a, SLOW[1](n, src, dst, mask))
    assert FAST[1](n, src, dst, np.zeros_like(skip)).sum() == n - 1


@pytest.mark.parametrize("n", [3, 8, 20])
def test_reduce_columns(rng, n):
    _, _, w, faces = edge_and_triangle_data(rng, n)
    assert np.array_equal(FAST[2](faces, len(w)), SLOW[2](faces, len(w)))


def test_distance_chain(rng):
    pts = rng.normal(size=(12, 5))
    D = SLOW[0](pts)
    sens = rng.normal(size=(12, 12))
    np.fill_diagonal(sens, 0)
    np.testing.assert_allclose(FAST[3](pts, D, sens), SLOW[3](pts, D, sens), rtol=1e-13, atol=1e-13)


def test_backend_flag_values():
    assert _resolve_backend(None) == "numba"
    assert _resolve_backend(" NumPy ") == "numpy"
    with pytest.raises(ValueError):
        _resolve_backend("cuda")


def test_numpy_backend_end_to_end():
    code = (
        "import topoprompt as tp; from topoprompt import kernels;"
        "c = tp.gaussian_init(10, 3, 1.0, 5); print(tp.BACKEND, kernels.pairwise_distances.__name__);"
        "print(tp.diagram(c).to_csv())"
    )

    def run(backend):
        env = dict(os.environ, TOPOPROMPT_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        return out.stdout.split("\n", 1)

    head_np, body_np = run("numpy")
    head_nb, body_nb = run("numba")
    assert head_np == "numpy _pairwise_distances_numpy"
    assert head_nb == "numba _pairwise_distances_numba"
    assert body_np == body_nb
