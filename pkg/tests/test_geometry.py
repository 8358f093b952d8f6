"""Domain geometry: ray intersections, tangent filtering, coverage."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itep.geometry import (
    SimpleDomain,
    covered_length,
    inside_indicator,
    intersect_ray,
)

EX = np.array([1.0, 0.0, 0.0])
EZ = np.array([0.0, 0.0, 1.0])


def unit_ball():
    return SimpleDomain.from_balls([([0.0, 0.0, 0.0], 1.0)])


def offset_ball():
    return SimpleDomain.from_balls([([2.0, 0.0, 0.0], 1.0)])


def two_ball_domain():
    return SimpleDomain.from_balls(
        [([2.0, 0.0, 0.0], 1.0), ([5.0, 0.0, 0.0], 1.0)]
    )


class TestIntersectRay:
    def test_unit_ball(self):
        ix = intersect_ray(unit_ball(), EZ)
        assert np.allclose(ix.radii, [1.0])

    def test_offset_ball_hit(self):
        ix = intersect_ray(offset_ball(), EX)
        assert np.allclose(ix.radii, [1.0, 3.0])

    def test_offset_ball_miss(self):
        ix = intersect_ray(offset_ball(), EZ)
        assert len(ix.radii) == 0

    def test_tangent_ray_dropped(self):
        dom = SimpleDomain.from_balls([([2.0, 0.0, 1.0], 1.0)])
        ix = intersect_ray(dom, EX)
        assert len(ix.radii) == 0

    def test_radii_on_boundary(self):
        dom = two_ball_domain()
        ix = intersect_ray(dom, EX)
        assert np.allclose(ix.radii, [1.0, 3.0, 4.0, 6.0])
        for r in ix.radii:
            # boundary points: distance to nearest center equals its radius
            p = r * EX
            d = min(abs(np.linalg.norm(p - np.array([2.0, 0, 0])) - 1.0),
                    abs(np.linalg.norm(p - np.array([5.0, 0, 0])) - 1.0))
            assert d < 1e-10

    def test_parity_matches_midpoint_indicator(self):
        dom = two_ball_domain()
        ix = intersect_ray(dom, EX)
        edges = [0.0] + list(ix.radii)
        for j, (a, b) in enumerate(zip(edges, edges[1:])):
            mid = 0.5 * (a + b) * EX
            assert inside_indicator(dom, mid) == bool(ix.parity[j])

    def test_overlapping_balls_merge(self):
        dom = SimpleDomain.from_balls(
            [([2.0, 0.0, 0.0], 1.0), ([3.0, 0.0, 0.0], 1.0)]
        )
        ix = intersect_ray(dom, EX)
        assert np.allclose(ix.radii, [1.0, 4.0])


class TestInsideIndicator:
    def test_origin_inside_unit_ball(self):
        assert inside_indicator(unit_ball(), np.zeros(3))

    def test_far_point_outside(self):
        assert not inside_indicator(unit_ball(), np.array([10.0, 0.0, 0.0]))

    def test_boundary_point_outside(self):
        assert not inside_indicator(unit_ball(), np.array([1.0, 0.0, 0.0]))


class TestCoveredLength:
    def test_unit_ball(self):
        assert covered_length(unit_ball(), EZ) == pytest.approx(1.0)

    def test_two_balls(self):
        assert covered_length(two_ball_domain(), EX) == pytest.approx(4.0)

    def test_miss(self):
        assert covered_length(offset_ball(), EZ) == pytest.approx(0.0)

    @given(
        st.floats(min_value=0.0, max_value=2 * np.pi),
        st.floats(min_value=-1.0, max_value=1.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_matches_dense_indicator_sampling(self, phi, cz):
        s = np.sqrt(max(0.0, 1.0 - cz * cz))
        direction = np.array([s * np.cos(phi), s * np.sin(phi), cz])
        dom = two_ball_domain()
        want = covered_length(dom, direction)
        rs = np.linspace(0.0, 8.0, 8001)
        inside = [inside_indicator(dom, r * direction) for r in rs]
        approx = np.trapezoid(np.asarray(inside, float), rs)
        assert abs(want - approx) < 1e-2
