import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import circle
from topoprompt import (
    DegenerateDensityError,
    PersistenceDiagram,
    PointCloud,
    UndefinedEntropyError,
    density_metrics,
    diagram,
    feature_counts,
    lifespan_stats,
    persistence_entropy,
    summarize,
)

INF = math.inf


def bars(*lifespans, dim=0):
    return PersistenceDiagram([(dim, 0.0, life) for life in lifespans] + [(0, 0.0, INF)])


class TestEntropy:
    def test_single_bar(self):
        assert persistence_entropy(bars(2.5)) == 0.0

    def test_two_equal_bars(self):
        assert abs(persistence_entropy(bars(1.0, 1.0)) - math.log(2)) <= 1e-12

    def test_one_three(self):
        expected = 0.25 * math.log(4) + 0.75 * math.log(4 / 3)
        assert abs(persistence_entropy(bars(1.0, 3.0)) - expected) <= 1e-12
        assert abs(expected - 0.5623) < 1e-4

    def test_pools_dimensions(self):
        dgm = PersistenceDiagram([(0, 0.0, 1.0), (1, 2.0, 5.0), (0, 0.0, INF)])
        assert abs(persistence_entropy(dgm) - persistence_entropy(bars(1.0, 3.0))) <= 1e-15
        assert persistence_entropy(dgm, dim=1) == 0.0

    def test_no_finite_pairs(self):
        with pytest.raises(UndefinedEntropyError):
            persistence_entropy(PersistenceDiagram([(0, 0.0, INF)]))

    def test_all_zero_lifespans(self):
        with pytest.raises(UndefinedEntropyError):
            persistence_entropy(bars(0.0, 0.0))

    @pytest.mark.parametrize("m", [1, 2, 7, 20, 101])
    def test_uniform(self, m):
        assert abs(persistence_entropy(bars(*[0.37] * m)) - math.log(m)) <= 1e-12


class TestLifespans:
    def test_arithmetic(self):
        avg, mx = lifespan_stats(bars(1.0, 1.0, 3.0), 0)
        assert abs(avg - 5 / 3) <= 1e-15 and mx == 3.0

    def test_empty(self):
        assert lifespan_stats(bars(1.0), 1) == (0.0, 0.0)

    def test_unit_square_h1(self, unit_square):
        avg, mx = lifespan_stats(diagram(unit_square), 1)
        assert avg == mx
        assert abs(avg - (math.sqrt(2) - 1)) <= 1e-12


class TestCounts:
    def test_unit_square(self, unit_square):
        assert feature_counts(diagram(unit_square)) == (4, 1)

    def test_two_points(self, two_points):
        assert feature_counts(diagram(two_points)) == (2, 0)

    def test_circle_noise_floor(self):
        dgm = diagram(PointCloud(circle(12)))
        assert feature_counts(dgm, 0.2, diameter=2.0) == (12, 1)

    def test_bad_floor(self, unit_square):
        with pytest.raises(ValueError):
            feature_counts(diagram(unit_square), 1.5)


class TestDensity:
    def test_unit_square(self, unit_square):
        assert density_metrics(unit_square, diagram(unit_square)) == (0.25, 1.0)

    def test_two_points(self, two_points):
        h1, nn = density_metrics(two_points, diagram(two_points))
        assert h1 == 0 and abs(nn - 0.2) <= 1e-15

    def test_coincident(self):
        cloud = PointCloud(np.zeros((3, 2)))
        with pytest.raises(DegenerateDensityError):
            density_metrics(cloud, diagram(cloud))


class TestSummarize:
    def test_unit_square(self, unit_square):
        s = summarize(unit_square)
        assert (s.h0_count, s.h1_count) == (4, 1)
        assert abs(s.avg_life_h1 - (math.sqrt(2) - 1)) <= 1e-12
        assert s.entropy_h1 == 0.0

    def test_two_points(self, two_points):
        s = summarize(two_points)
        assert s.persistence_entropy == 0.0 and s.h1_count == 0
        assert s.entropy_h1 is None

    def test_to_dict_puts_step_first(self, unit_square):
        assert next(iter(summarize(unit_square).to_dict(step=3))) == "step"

    @settings(max_examples=40, deadline=None)
    @given(st.integers(3, 12), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
    def test_scale_behaviour(self, n, seed, k):
        pts = np.random.default_rng(seed).normal(size=(n, 3))
        a, b = summarize(PointCloud(pts)), summarize(PointCloud(k * pts))
        assert abs(a.persistence_entropy - b.persistence_entropy) <= 1e-9
        for field in ("avg_life_h0", "avg_life_h1", "max_life"):
            x, y = getattr(a, field), getattr(b, field)
            assert abs(k * x - y) <= 1e-9 * max(abs(y), 1e-300)
        assert a.h0_count == n == b.h0_count
        assert 0 <= a.h1_count <= math.comb(n, 3)
