"""Interior transmission eigenvalues of penetrable simple domains.

The library reduces the 3D interior transmission problem to radial ODEs
along rays, evaluates the interface functional determinant as an entire
function of the wavenumber, locates its complex zeros by the argument
principle, propagates them through multi-interval geometries, checks the
travel-time density and indicator laws, and recovers parametric profiles
from spectra."""

from .geometry import (
    SimpleDomain,
    IntersectionSet,
    intersect_ray,
    inside_indicator,
    covered_length,
)
from .medium import (
    MediumField,
    RadialProfile,
    restrict_to_ray,
    travel_time,
    liouville_transform,
)
from .determinant import (
    DeterminantFunction,
    DeterminantValue,
    determinant,
    determinant_function,
    alpha_diagnostic,
)
from .spectra import (
    SearchRectangle,
    EigenvalueRecord,
    DensityReport,
    winding_count,
    find_zeros,
    count_zeros_sector,
    density_estimate,
    indicator_estimate,
)
from .tunneling import (
    IntervalSpec,
    TunnelingChain,
    ray_intervals,
    interval_eigenvalues,
    propagate,
    full_spectrum,
)
from .inverse import (
    SpectrumSample,
    FitResult,
    spectral_distance,
    uniqueness_probe,
    fit_profile,
)

__version__ = "0.1.0"

__all__ = [
    "SimpleDomain", "IntersectionSet", "intersect_ray", "inside_indicator",
    "covered_length",
    "MediumField", "RadialProfile", "restrict_to_ray", "travel_time",
    "liouville_transform",
    "DeterminantFunction", "DeterminantValue", "determinant",
    "determinant_function", "alpha_diagnostic",
    "SearchRectangle", "EigenvalueRecord", "DensityReport", "winding_count",
    "find_zeros", "count_zeros_sector", "density_estimate",
    "indicator_estimate",
    "IntervalSpec", "TunnelingChain", "ray_intervals", "interval_eigenvalues",
    "propagate", "full_spectrum",
    "SpectrumSample", "FitResult", "spectral_distance", "uniqueness_probe",
    "fit_profile",
]
