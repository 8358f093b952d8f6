"""Multi-interval eigenvalue propagation across interface radii."""

import numpy as np
import pytest

from itep.geometry import SimpleDomain, intersect_ray
from itep.medium import MediumField, restrict_to_ray
from itep.spectra import SearchRectangle
from itep.tunneling import (
    full_spectrum,
    interval_eigenvalues,
    propagate,
    ray_intervals,
)

EX = np.array([1.0, 0.0, 0.0])
EZ = np.array([0.0, 0.0, 1.0])


@pytest.fixture(scope="module")
def two_ball_setup(two_balls):
    dom = SimpleDomain.from_balls([(b.center, b.radius) for b in two_balls.balls])
    ix = intersect_ray(dom, EX)
    prof = restrict_to_ray(two_balls, EX)
    return prof, ix


class TestIntervals:
    def test_two_ball_layout(self, two_ball_setup):
        _, ix = two_ball_setup
        specs = ray_intervals(ix)
        bounds = [(s.r_lo, s.r_hi, s.inside) for s in specs]
        assert bounds == [
            (0.0, 1.0, False),
            (1.0, 3.0, True),
            (3.0, 4.0, False),
            (4.0, 6.0, True),
        ]


class TestIntervalEigenvalues:
    def test_gap_interval_empty(self, two_ball_setup):
        prof, ix = two_ball_setup
        gap = [s for s in ray_intervals(ix) if not s.inside and s.r_lo == 3.0][0]
        recs = interval_eigenvalues(0, prof, gap, SearchRectangle(0.5, 20.0, -1.0, 1.0))
        assert recs == []

    def test_single_ball_origin_anchored(self, profile4, thin_rect):
        dom = SimpleDomain.from_balls([([0.0, 0.0, 0.0], 1.0)])
        ix = intersect_ray(dom, EZ)
        spec = ray_intervals(ix)[0]
        recs = interval_eigenvalues(0, profile4, spec, SearchRectangle(0.5, 13.0, -1.0, 1.0))
        ks = sorted(r.k.real for r in recs)
        assert np.allclose(ks, np.pi * np.arange(1, 5), atol=1e-8)

    def test_empty_rect(self, two_ball_setup):
        prof, ix = two_ball_setup
        first = [s for s in ray_intervals(ix) if s.inside][0]
        recs = interval_eigenvalues(0, prof, first, SearchRectangle(0.5, 2.0, -0.2, 0.2))
        assert recs == []


class TestPropagate:
    def test_eigenvalue_propagates(self, two_ball_setup):
        prof, ix = two_ball_setup
        # first inside interval [1,3] with n0=2.25 behaves like a width-2
        # constant slab: m*pi are eigenvalues there
        chain = propagate(0, np.pi, prof, ix)
        assert chain.verdict == "propagates"
        assert max(chain.interface_residuals) < 1e-7

    def test_midpoint_fails(self, two_ball_setup):
        prof, ix = two_ball_setup
        chain = propagate(0, 1.5 * np.pi, prof, ix)
        assert chain.verdict.startswith("fails_at")
        assert max(chain.interface_residuals) > 1e-3

    def test_background_degenerate(self, profile1):
        dom = SimpleDomain.from_balls([([0.0, 0.0, 0.0], 1.0)])
        ix = intersect_ray(dom, EZ)
        chain = propagate(0, 2.0, profile1, ix)
        assert chain.degenerate


class TestFullSpectrum:
    def test_single_ball_matches_interval(self, profile4):
        dom = SimpleDomain.from_balls([([0.0, 0.0, 0.0], 1.0)])
        ix = intersect_ray(dom, EZ)
        rect = SearchRectangle(0.5, 13.0, -1.0, 1.0)
        full = full_spectrum(0, profile4, ix, rect)
        spec = ray_intervals(ix)[0]
        single = interval_eigenvalues(0, profile4, spec, rect)
        assert len(full) == len(single)
        for a, b in zip(full, single):
            assert abs(a.k - b.k) < 1e-9

    def test_dedup_idempotent(self, two_ball_setup):
        prof, ix = two_ball_setup
        rect = SearchRectangle(0.5, 7.0, -0.5, 0.5)
        a = full_spectrum(0, prof, ix, rect)
        b = full_spectrum(0, prof, ix, rect)
        assert len(a) == len(b)
        for ra, rb in zip(a, b):
            assert ra.k == rb.k and ra.multiplicity == rb.multiplicity

    def test_empty_intersections(self, two_balls):
        dom = SimpleDomain.from_balls([(b.center, b.radius) for b in two_balls.balls])
        ix = intersect_ray(dom, EZ)
        prof = restrict_to_ray(two_balls, EZ)
        assert full_spectrum(0, prof, ix, SearchRectangle(0.5, 10.0, -1.0, 1.0)) == []

    def test_split_invariance(self, profile4):
        # inserting a spurious split point in the free region (beyond the
        # ball, where the propagating solution already equals the free-space
        # mode) must not change the propagating zero set
        from itep.geometry import IntersectionSet

        dom = SimpleDomain.from_balls([([0.0, 0.0, 0.0], 1.0)])
        ix = intersect_ray(dom, EZ)
        rect = SearchRectangle(0.5, 13.0, -1.0, 1.0)
        base = [r for r in full_spectrum(0, profile4, ix, rect) if r.verdict == "propagates"]
        split = IntersectionSet(
            direction=ix.direction,
            radii=(1.0, 1.5),
            parity=(True, False, False),
        )
        refined = [
            r for r in full_spectrum(0, profile4, split, rect) if r.verdict == "propagates"
        ]
        base_ks = sorted(r.k.real for r in base)
        ref_ks = sorted(r.k.real for r in refined)
        assert len(base_ks) == len(ref_ks)
        assert np.allclose(base_ks, ref_ks, atol=1e-7)
