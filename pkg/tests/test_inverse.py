"""Spectral comparison, uniqueness probing, and profile recovery."""

import numpy as np
import pytest

from itep.inverse import (
    IncompatibleTruncation,
    SpectrumSample,
    _ray_spectrum,
    fit_profile,
    spectral_distance,
    uniqueness_probe,
)
from itep.medium import MediumField
from itep.spectra import SearchRectangle

EZ = np.array([0.0, 0.0, 1.0])
EX = np.array([1.0, 0.0, 0.0])
RECT = SearchRectangle(0.5, 13.0, -1.0, 1.0)


def _sample(entries):
    return SpectrumSample(entries=list(entries))


@pytest.fixture(scope="module")
def spec4():
    return _ray_spectrum(
        MediumField.uniform_ball([0, 0, 0], 1.0, 4.0), EZ, [0], RECT
    )


class TestSpectralDistance:
    def test_identical_zero(self, spec4):
        assert spectral_distance(spec4, spec4, k_cut=13.0) == 0.0

    def test_empty_vs_empty(self):
        assert spectral_distance(_sample([]), _sample([]), k_cut=10.0) == 0.0

    def test_symmetry(self):
        a = _sample([(3.1, 0), (6.3, 0)])
        b = _sample([(3.2, 0), (6.1, 0)])
        assert spectral_distance(a, b, k_cut=10.0) == spectral_distance(
            b, a, k_cut=10.0
        )

    def test_small_perturbation_below_resolution(self):
        a = _sample([(3.1, 0), (6.3, 0)])
        b = _sample([(3.1 + 5e-8, 0), (6.3 - 5e-8, 0)])
        assert spectral_distance(a, b, k_cut=10.0) == 0.0

    def test_incompatible_truncation(self):
        a = _sample([(float(m), 0) for m in range(1, 11)])
        b = _sample([(float(m), 0) for m in range(1, 4)])
        with pytest.raises(IncompatibleTruncation):
            spectral_distance(a, b, k_cut=12.0)

    def test_distinguishes_media(self, spec4):
        spec441 = _ray_spectrum(
            MediumField.uniform_ball([0, 0, 0], 1.0, 4.41), EZ, [0], RECT
        )
        assert spectral_distance(spec4, spec441, k_cut=13.0) > 0.05


class TestUniquenessProbe:
    def test_same_field(self):
        f = MediumField.uniform_ball([0, 0, 0], 1.0, 4.0)
        v = uniqueness_probe(f, f, EZ, [0], RECT, tol=1e-3)
        assert v == "indistinguishable_at_resolution"

    def test_distinct_fields(self):
        f1 = MediumField.uniform_ball([0, 0, 0], 1.0, 4.0)
        f2 = MediumField.uniform_ball([0, 0, 0], 1.0, 4.41)
        assert uniqueness_probe(f1, f2, EZ, [0], RECT, tol=1e-3) == "distinct"

    def test_fields_equal_along_probed_ray_only(self):
        # two union-of-balls media sharing the ball on the +z ray but
        # differing in a ball placed off that ray
        f1 = MediumField.union_of_balls(
            [([0.0, 0.0, 2.0], 0.5, 4.0), ([3.0, 0.0, 0.0], 0.5, 2.0)]
        )
        f2 = MediumField.union_of_balls(
            [([0.0, 0.0, 2.0], 0.5, 4.0), ([3.0, 0.0, 0.0], 0.5, 9.0)]
        )
        v = uniqueness_probe(f1, f2, EZ, [0], RECT, tol=1e-3)
        assert v == "indistinguishable_at_resolution"
        assert uniqueness_probe(f1, f2, EX, [0], RECT, tol=1e-3) == "distinct"


class TestFitProfile:
    def test_exact_init_converges_immediately(self, spec4):
        family = lambda p: MediumField.uniform_ball([0, 0, 0], 1.0, p[0])
        res = fit_profile(spec4, family, [4.0], bounds=[(2.0, 6.0)])
        assert res.converged
        assert res.iterations <= 2
        assert res.mismatch < 1e-10

    def test_mismatch_monotone_over_accepted_steps(self, spec4):
        family = lambda p: MediumField.uniform_ball([0, 0, 0], 1.0, p[0])
        res = fit_profile(spec4, family, [3.6], bounds=[(2.0, 6.0)], max_iter=8)
        assert all(b <= a + 1e-12 for a, b in zip(res.history, res.history[1:]))

    def test_family_dimension_guard(self, spec4):
        family = lambda p: MediumField.uniform_ball([0, 0, 0], 1.0, p[0])
        with pytest.raises(ValueError):
            fit_profile(spec4, family, [1.0] * 5, bounds=[(0.5, 2.0)] * 5)
