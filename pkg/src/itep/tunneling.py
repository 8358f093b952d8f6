"""Multi-interval eigenvalue pipeline along one ray: per-interval determinant
eigenproblems, propagation of a candidate eigenvalue through every crossing
radius by re-anchored interface matching, and the deduplicated full-spectrum
union with propagation verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .determinant import DeterminantFunction, determinant_function
from .geometry import IntersectionSet
from .medium import RadialProfile
from .spectra import EigenvalueRecord, SearchRectangle, find_zeros

__all__ = [
    "IntervalSpec",
    "TunnelingChain",
    "ray_intervals",
    "interval_eigenvalues",
    "propagate",
    "full_spectrum",
    "PROPAGATION_TOL",
]

PROPAGATION_TOL = 1e-7
DEGENERATE_TOL = 1e-10
DEDUP_TOL = 1e-7


@dataclass(frozen=True)
class IntervalSpec:
    """One interval [r_lo, r_hi] between consecutive crossing radii."""

    j: int
    r_lo: float
    r_hi: float
    inside: bool


@dataclass
class TunnelingChain:
    """Residuals of one candidate k at every crossing radius.

    interface_residuals[j] is the normalized |D_l(k; radii[j])| of the
    solution anchored at radii[j-1] (origin data for j = 0, where the
    residual vanishes by construction of the interface matching)."""

    l: int
    k: complex
    radii: tuple[float, ...]
    interface_residuals: list[float] = field(default_factory=list)
    verdict: str = ""
    degenerate: bool = False


def ray_intervals(
    intersections: IntersectionSet, r_max: float | None = None
) -> list[IntervalSpec]:
    """IntervalSpec list induced by the crossing radii, through the last
    crossing unless r_max extends the final outside interval."""
    if r_max is None:
        r_max = intersections.radii[-1] if intersections.radii else 0.0
    out = []
    for j, (a, b, flag) in enumerate(intersections.intervals(r_max)):
        out.append(IntervalSpec(j=j, r_lo=a, r_hi=b, inside=flag))
    return out


def _interval_determinant(
    l: int, profile: RadialProfile, interval: IntervalSpec, rtol=None
) -> DeterminantFunction:
    kwargs = {} if rtol is None else {"rtol": rtol}
    if interval.r_lo == 0.0:
        return determinant_function(l, profile, interval.r_hi, **kwargs)
    return determinant_function(
        l, profile, interval.r_hi, start=("interface", interval.r_lo), **kwargs
    )


def _is_degenerate(df: DeterminantFunction, rect: SearchRectangle) -> bool:
    """Identically-vanishing determinant check on a 32-point probe grid."""
    re = np.linspace(rect.re_min, rect.re_max, 8)
    im = np.linspace(rect.im_min, rect.im_max, 4)
    ks = (re[:, None] + 1j * im[None, :]).ravel()
    return float(np.max(np.abs(df.values(ks)))) < DEGENERATE_TOL


def interval_eigenvalues(
    l: int,
    profile: RadialProfile,
    interval: IntervalSpec,
    rect: SearchRectangle,
    rng=None,
) -> list[EigenvalueRecord]:
    """Zeros of k -> D_l(k; r_hi) with the solution anchored at r_lo.

    The anchor uses origin data when r_lo = 0 and interface matching
    otherwise. On an interval where the medium is the background the
    determinant vanishes identically and the list is empty."""
    df = _interval_determinant(l, profile, interval)
    if _is_degenerate(df, rect):
        return []
    return find_zeros(df, rect, l=l, rng=rng)


def propagate(
    l: int,
    k: complex,
    profile: RadialProfile,
    intersections: IntersectionSet,
) -> TunnelingChain:
    """Chain of re-anchored interface residuals of k across all radii.

    At each crossing radius the determinant of the solution anchored at the
    previous radius is evaluated; a true eigenvalue of the whole chain makes
    every entry vanish, a spurious one fails at the first interface past its
    native interval."""
    radii = intersections.radii
    chain = TunnelingChain(l=l, k=complex(k), radii=radii)
    if not radii:
        chain.verdict = "propagates"
        chain.degenerate = True
        return chain
    anchors = (0.0,) + radii[:-1]
    degenerate = True
    for j, (r_lo, r_hi) in enumerate(zip(anchors, radii)):
        if r_lo == 0.0:
            df = determinant_function(l, profile, r_hi)
        else:
            df = determinant_function(l, profile, r_hi, start=("interface", r_lo))
        res = float(abs(df.values(np.array([k]))[0]))
        chain.interface_residuals.append(res)
        # a vanishing residual on a background interval carries no
        # information; track whether any interface was informative
        probe = np.linspace(0.3, max(1.0, 2.0 * abs(k)), 8).astype(complex)
        if float(np.max(np.abs(df.values(probe)))) >= DEGENERATE_TOL:
            degenerate = False
    chain.degenerate = degenerate
    bad = [j for j, res in enumerate(chain.interface_residuals) if res >= PROPAGATION_TOL]
    chain.verdict = "propagates" if not bad else f"fails_at({bad[0]})"
    return chain


def full_spectrum(
    l: int,
    profile: RadialProfile,
    intersections: IntersectionSet,
    rect: SearchRectangle,
    rng=None,
) -> list[EigenvalueRecord]:
    """Union of per-inside-interval eigenvalues, deduplicated, each record
    annotated with its propagation verdict and interface residuals."""
    records: list[EigenvalueRecord] = []
    for interval in ray_intervals(intersections):
        if not interval.inside:
            continue
        for rec in interval_eigenvalues(l, profile, interval, rect, rng=rng):
            if any(abs(rec.k - r.k) < DEDUP_TOL for r in records):
                continue
            chain = propagate(l, rec.k, profile, intersections)
            rec.interface_residuals = list(chain.interface_residuals)
            rec.verdict = chain.verdict
            records.append(rec)
    records.sort(key=lambda r: (r.k.real, r.k.imag))
    return records
