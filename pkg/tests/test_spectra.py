"""Zero localization by the argument principle, density and indicator laws."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itep.spectra import (
    SearchRectangle,
    count_zeros_sector,
    density_estimate,
    find_zeros,
    indicator_estimate,
    winding_count,
)

from conftest import oracle_det4


def _sin(ks):
    ks = np.asarray(ks, complex)
    return np.sin(ks)


class TestWindingCount:
    def test_sin_three_zeros(self):
        assert winding_count(_sin, SearchRectangle(0.5, 10.0, -1.0, 1.0)) == 3

    def test_double_zero(self):
        f = lambda ks: np.asarray(ks, complex) ** 2
        assert winding_count(f, SearchRectangle(-1.0, 1.0, -1.0, 1.0)) == 2

    def test_exp_no_zeros(self):
        f = lambda ks: np.exp(np.asarray(ks, complex))
        assert winding_count(f, SearchRectangle(-2.0, 3.0, -2.0, 2.0)) == 0

    def test_additivity_over_quadrants(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            # avoid cut lines through zeros of sin: jitter the split point
            cx = 5.0 + 0.3 * rng.standard_normal()
            cy = 0.1 * rng.standard_normal()
            outer = SearchRectangle(0.5, 10.0, -1.0, 1.0)
            quads = [
                SearchRectangle(0.5, cx, -1.0, cy),
                SearchRectangle(cx, 10.0, -1.0, cy),
                SearchRectangle(0.5, cx, cy, 1.0),
                SearchRectangle(cx, 10.0, cy, 1.0),
            ]
            total = sum(winding_count(_sin, q) for q in quads)
            assert total == winding_count(_sin, outer)


class TestFindZeros:
    def test_sin_roots(self):
        recs = find_zeros(_sin, SearchRectangle(0.5, 10.0, -1.0, 1.0), tol=1e-10)
        ks = sorted(r.k.real for r in recs)
        assert len(ks) == 3
        for got, want in zip(ks, [np.pi, 2 * np.pi, 3 * np.pi]):
            assert abs(got - want) < 1e-10

    def test_empty_rect(self):
        recs = find_zeros(_sin, SearchRectangle(0.5, 2.0, 0.5, 1.5))
        assert recs == []

    def test_all_returned_zeros_are_accurate_and_inside(self):
        rect = SearchRectangle(0.5, 10.0, -1.0, 1.0)
        for r in find_zeros(_sin, rect):
            assert abs(_sin(np.array([r.k]))[0]) < 1e-9
            assert rect.contains(r.k, pad=1e-8)

    def test_triple_zero_multiplicity(self):
        f = lambda ks: np.sin(np.asarray(ks, complex)) ** 3
        recs = find_zeros(f, SearchRectangle(2.0, 4.0, -0.5, 0.5))
        assert len(recs) == 1
        assert recs[0].multiplicity == 3
        assert abs(recs[0].k - np.pi) < 1e-8

    def test_conjugate_pairing_polynomial(self):
        # real-coefficient polynomial with complex pairs
        f = lambda ks: (np.asarray(ks, complex) ** 2 - 2 * np.asarray(ks, complex) + 2) * (
            np.asarray(ks, complex) - 0.5
        )
        recs = find_zeros(f, SearchRectangle(-1.0, 3.0, -2.0, 2.0))
        ks = np.array(sorted((r.k for r in recs), key=lambda z: (z.real, z.imag)))
        assert len(ks) == 3
        conj_set = np.array(sorted((np.conj(z) for z in ks), key=lambda z: (z.real, z.imag)))
        assert np.max(np.abs(ks - conj_set)) < 1e-8

    def test_determinant_zeros_match_oracle(self, det4):
        # oracle roots: sin^3(k)/k vanishes at m*pi (triple)
        recs = find_zeros(det4, SearchRectangle(0.5, 13.0, -1.0, 1.0))
        ks = sorted(r.k.real for r in recs)
        assert len(ks) == 4
        for got, want in zip(ks, np.pi * np.arange(1, 5)):
            assert abs(got - want) < 1e-8
        assert all(r.multiplicity == 3 for r in recs)


class TestCountZerosSector:
    def test_sin_r10(self):
        assert count_zeros_sector(_sin, -0.1, 0.1, 10.0) == 3

    def test_sin_r1(self):
        assert count_zeros_sector(_sin, -0.1, 0.1, 1.0) == 0

    def test_monotone_in_r(self):
        counts = [count_zeros_sector(_sin, -0.1, 0.1, R) for R in (5.0, 10.0, 15.0, 20.0)]
        assert all(b >= a for a, b in zip(counts, counts[1:]))


class TestDensityEstimate:
    def test_sin_2k(self):
        f = lambda ks: np.sin(2 * np.asarray(ks, complex))
        rep = density_estimate(f, -0.1, 0.1, [40.0, 60.0, 80.0, 100.0], theoretical=2 / np.pi)
        assert rep.slope == pytest.approx(2 / np.pi, rel=0.02)
        assert all(b >= a for a, b in zip(rep.counts, rep.counts[1:]))

    def test_degenerate_flagged(self, profile1):
        from itep.determinant import determinant_function

        df = determinant_function(0, profile1, 1.0)
        rep = density_estimate(df, -0.1, 0.1, [5.0, 10.0, 15.0], theoretical=0.0)
        assert rep.degenerate


class TestIndicatorEstimate:
    def test_sin_imaginary_axis(self):
        assert indicator_estimate(_sin, np.pi / 2, np.linspace(5, 40, 12)) == pytest.approx(
            1.0, abs=0.02
        )

    def test_sin_real_axis(self):
        assert abs(indicator_estimate(_sin, 0.0, np.linspace(5, 40, 12))) < 0.05
