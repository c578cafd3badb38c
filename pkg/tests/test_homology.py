import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import circle, kruskal_weights
from topoprompt import (
    GuardError,
    PersistenceDiagram,
    PointCloud,
    diagram,
    distance_matrix,
    h0_persistence,
    h1_persistence,
    oracle_persistence,
    vr_filtration,
)
from topoprompt.errors import SnapshotFormatError


def line_matrix(*dists):
    """Distance matrix of three points with D01, D02, D12 as given."""
    d01, d02, d12 = dists
    return np.array([[0, d01, d02], [d01, 0, d12], [d02, d12, 0]], dtype=float)


class TestFiltration:
    def test_two_points(self):
        simplices = vr_filtration([[0, 5], [5, 0]])
        assert [(s.vertices, s.value) for s in simplices] == [((0,), 0.0), ((1,), 0.0), ((0, 1), 5.0)]

    def test_triangle_takes_longest_edge(self):
        tri = [s for s in vr_filtration(line_matrix(1, 2, 1)) if s.dim == 2]
        assert len(tri) == 1 and tri[0].value == 2.0

    def test_binomial_counts(self, rng):
        simplices = vr_filtration(distance_matrix(PointCloud(rng.normal(size=(8, 3)))))
        assert len(simplices) == 8 + 28 + 56
        assert [sum(s.dim == k for s in simplices) for k in range(3)] == [8, 28, 56]

    def test_order_and_faces_first(self, rng):
        simplices = vr_filtration(distance_matrix(PointCloud(rng.normal(size=(7, 2)))))
        keys = [s.sort_key() for s in simplices]
        assert keys == sorted(keys)
        seen = set()
        for s in simplices:
            if s.dim > 0:
                assert all(f in seen for f in combinations(s.vertices, s.dim))
            seen.add(s.vertices)

    def test_max_dim_one(self, rng):
        simplices = vr_filtration(distance_matrix(PointCloud(rng.normal(size=(5, 2)))), max_dim=1)
        assert max(s.dim for s in simplices) == 1


class TestH0:
    def test_two_points(self):
        assert h0_persistence([[0, 5], [5, 0]]) == [(0, 0.0, 5.0), (0, 0.0, math.inf)]

    def test_equilateral(self):
        deaths = sorted(p.death for p in h0_persistence(line_matrix(1, 1, 1)) if not p.is_essential)
        assert deaths == [1.0, 1.0]

    def test_coincident(self):
        pairs = diagram(PointCloud(np.ones((5, 3)))).in_dim(0)
        assert len(pairs) == 5
        assert [p.death for p in pairs if not p.is_essential] == [0.0] * 4

    @pytest.mark.parametrize("seed", range(5))
    def test_mst_weights(self, seed):
        pts = np.random.default_rng(seed).normal(size=(30, 4))
        deaths = sorted(p.death for p in diagram(PointCloud(pts)).finite(0))
        np.testing.assert_allclose(deaths, kruskal_weights(pts), rtol=0, atol=1e-12)


class TestH1:
    def test_unit_square(self, unit_square):
        (pair,) = h1_persistence(distance_matrix(unit_square))
        assert pair.dim == 1
        assert abs(pair.birth - 1) <= 1e-9 and abs(pair.death - math.sqrt(2)) <= 1e-9

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(0.01, 10), min_size=3, max_size=3))
    def test_three_points_never_loop(self, sides):
        a, b, c = sorted(sides)
        c = min(c, a + b)  # keep it metric
        assert h1_persistence(line_matrix(a, b, c)) == []
        assert oracle_persistence(line_matrix(a, b, c)).in_dim(1) == []

    def test_circle_dominant_loop(self):
        pairs = diagram(PointCloud(circle(12))).in_dim(1)
        spans = sorted((p.lifespan for p in pairs), reverse=True)
        assert spans[0] > 0
        assert all(spans[0] >= 5 * s for s in spans[1:])

    def test_births_and_deaths_are_filtration_values(self, rng):
        for _ in range(10):
            cloud = PointCloud(rng.normal(size=(9, 3)))
            D = distance_matrix(cloud).values
            edge_vals = set(D[np.triu_indices(9, 1)].tolist())
            tri_vals = {max(D[a, b], D[a, c], D[b, c]) for a, b, c in combinations(range(9), 3)}
            for p in diagram(cloud).in_dim(1):
                assert p.birth in edge_vals and p.death in tri_vals


class TestDiagram:
    def test_two_point_cloud(self, two_points):
        dgm = diagram(two_points)
        assert len(dgm.in_dim(0)) == 2 and dgm.in_dim(1) == []

    def test_unit_square(self, unit_square):
        dgm = diagram(unit_square)
        assert sorted(p.death for p in dgm.finite(0)) == [1.0, 1.0, 1.0]
        assert sum(p.is_essential for p in dgm.in_dim(0)) == 1
        assert len(dgm.in_dim(1)) == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_oracle(self, seed):
        cloud = PointCloud(np.random.default_rng(seed).normal(size=(8, 3)))
        assert diagram(cloud) == oracle_persistence(distance_matrix(cloud))

    def test_matches_oracle_with_ties(self):
        # integer grid points produce many equal distances
        pts = np.array([[x, y] for x in range(3) for y in range(3)], dtype=float)
        assert diagram(PointCloud(pts)) == oracle_persistence(distance_matrix(PointCloud(pts)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(3, 10), st.integers(0, 2**32 - 1))
    def test_permutation_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        pts = rng.normal(size=(n, 3))
        perm = rng.permutation(n)
        assert diagram(PointCloud(pts)) == diagram(PointCloud(pts[perm]))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 20), st.integers(0, 2**32 - 1))
    def test_h0_count_is_n(self, n, seed):
        pts = np.random.default_rng(seed).normal(size=(n, 2))
        assert len(diagram(PointCloud(pts)).in_dim(0)) == n

    def test_csv_round_trip(self, unit_square):
        dgm = diagram(unit_square)
        text = dgm.to_csv()
        assert text.splitlines()[0] == "dim,birth,death"
        assert "0,0.0,inf" in text.splitlines()
        assert PersistenceDiagram.from_csv(text) == dgm

    def test_csv_header_required(self):
        with pytest.raises(SnapshotFormatError):
            PersistenceDiagram.from_csv("a,b,c\n0,0,1\n")


class TestOracle:
    def test_guard(self):
        with pytest.raises(GuardError):
            oracle_persistence(distance_matrix(PointCloud(np.arange(26.0).reshape(13, 2))))

    def test_unit_square(self, unit_square):
        (pair,) = oracle_persistence(distance_matrix(unit_square)).in_dim(1)
        assert abs(pair.birth - 1) <= 1e-9 and abs(pair.death - math.sqrt(2)) <= 1e-9

    def test_two_points(self):
        assert oracle_persistence([[0, 5], [5, 0]]).pairs == [(0, 0.0, 5.0), (0, 0.0, math.inf)]
