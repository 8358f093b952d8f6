"""Index-of-refraction fields, their restriction to rays from the origin,
the travel-time integral, and the Liouville change of variables.

A :class:`MediumField` describes n(x) on R^3 with background value 1; a
:class:`RadialProfile` is its restriction r -> n(r * direction) along one
ray, carrying the breakpoint radii where smoothness may fail. Profiles that
are piecewise constant expose that structure so the ODE integrator can take
a fast path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

__all__ = [
    "MediumField",
    "RadialProfile",
    "NonUnitOriginIndexWarning",
    "restrict_to_ray",
    "travel_time",
    "liouville_transform",
]

_BREAK_TOL = 1e-12


class NonUnitOriginIndexWarning(UserWarning):
    """n(0) != 1: the normalization assumptions behind the density law are
    formally violated, though the determinant machinery stays well-defined."""


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float
    n0: float = 1.0


@dataclass(frozen=True)
class MediumField:
    """Index of refraction n(x); n = 1 outside the support.

    kind: one of "uniform_ball", "radially_stratified", "union_of_balls",
    "tabulated".
    """

    kind: str
    balls: tuple[Ball, ...] = ()
    radius: float = 0.0                      # support radius for radial kinds
    coeffs: tuple[float, ...] = ()           # polynomial in r, radial kinds
    r_table: tuple[float, ...] = ()
    n_table: tuple[float, ...] = ()

    @staticmethod
    def uniform_ball(center, radius: float, n0: float) -> "MediumField":
        if radius <= 0 or n0 <= 0:
            raise ValueError("radius and n0 must be positive")
        return MediumField(
            kind="uniform_ball",
            balls=(Ball(np.asarray(center, dtype=float), radius, n0),),
        )

    @staticmethod
    def union_of_balls(balls: Sequence[tuple]) -> "MediumField":
        out = []
        for center, radius, n0 in balls:
            if radius <= 0 or n0 <= 0:
                raise ValueError("radius and n0 must be positive")
            out.append(Ball(np.asarray(center, dtype=float), radius, n0))
        return MediumField(kind="union_of_balls", balls=tuple(out))

    @staticmethod
    def radially_stratified(radius: float, coeffs: Sequence[float]) -> "MediumField":
        """n(r) = sum_i coeffs[i] r^i for r < radius, 1 outside; centered at
        the origin."""
        if radius <= 0:
            raise ValueError("radius must be positive")
        return MediumField(
            kind="radially_stratified", radius=radius, coeffs=tuple(coeffs)
        )

    @staticmethod
    def tabulated(r_table: Sequence[float], n_table: Sequence[float]) -> "MediumField":
        r = tuple(float(v) for v in r_table)
        n = tuple(float(v) for v in n_table)
        if len(r) != len(n) or len(r) < 2:
            raise ValueError("tables must have equal length >= 2")
        if any(b <= a for a, b in zip(r, r[1:])):
            raise ValueError("r_table must be strictly increasing")
        if min(n) <= 0:
            raise ValueError("n must be positive")
        return MediumField(kind="tabulated", r_table=r, n_table=n)

    @staticmethod
    def background() -> "MediumField":
        """n identically 1 — no perturbation."""
        return MediumField(kind="union_of_balls", balls=())

    def evaluate(self, point) -> float:
        """n at a 3-vector point."""
        p = np.asarray(point, dtype=float)
        if self.kind in ("uniform_ball", "union_of_balls"):
            for b in self.balls:
                if np.linalg.norm(p - b.center) < b.radius:
                    return b.n0
            return 1.0
        r = float(np.linalg.norm(p))
        if self.kind == "radially_stratified":
            if r >= self.radius:
                return 1.0
            return float(np.polyval(self.coeffs[::-1], r))
        if self.kind == "tabulated":
            if r >= self.r_table[-1]:
                return 1.0
            return float(np.interp(r, self.r_table, self.n_table))
        raise ValueError(f"unknown medium kind {self.kind!r}")


@dataclass(frozen=True)
class RadialProfile:
    """n along one ray: evaluator r -> n(r * direction) with the sorted
    breakpoint radii and the radius past which n is identically 1.

    ``constant_segments``, when present, lists (a, b, n0) triples covering
    [0, support_end] on which n is constant; [support_end, inf) always has
    n = 1.
    """

    direction: np.ndarray
    evaluator: Callable[[float], float]
    breakpoints: tuple[float, ...]
    support_end: float
    constant_segments: tuple[tuple[float, float, float], ...] | None = None
    _bcache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, r: float) -> float:
        if r >= self.support_end:
            return 1.0
        return self.evaluator(r)

    def n_max(self) -> float:
        if self.constant_segments is not None:
            return max([n for _, _, n in self.constant_segments], default=1.0)
        rs = np.linspace(0.0, max(self.support_end, 1e-9), 257)
        return max(1.0, max(self(float(r)) for r in rs))


def restrict_to_ray(fld: MediumField, direction) -> RadialProfile:
    """Restrict a field to the ray {r * direction : r >= 0}."""
    d = np.asarray(direction, dtype=float)
    nrm = np.linalg.norm(d)
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"direction must be a unit vector, |d| = {nrm!r}")

    if fld.kind in ("uniform_ball", "union_of_balls"):
        crossings = []
        for b in fld.balls:
            # |r d - c|^2 = R^2: quadratic in r
            p = float(np.dot(d, b.center))
            q = float(np.dot(b.center, b.center)) - b.radius**2
            disc = p * p - q
            if disc <= _BREAK_TOL * max(1.0, abs(q)):
                continue  # miss or tangent ray
            rt = math.sqrt(disc)
            lo, hi = p - rt, p + rt
            if hi <= 0:
                continue
            crossings.append((max(lo, 0.0), hi, b.n0))
        crossings.sort()
        segs: list[tuple[float, float, float]] = []
        cursor = 0.0
        for lo, hi, n0 in crossings:
            if lo > cursor + _BREAK_TOL:
                segs.append((cursor, lo, 1.0))
                cursor = lo
            if hi > cursor:
                # overlapping balls: first ball in radial order wins
                segs.append((cursor, hi, n0))
                cursor = hi
        support = cursor
        breaks = sorted(
            {round(v, 14) for a, b2, _ in segs for v in (a, b2) if v > _BREAK_TOL}
        )
        segments = tuple(segs)

        def ev(r: float, _segs=segments) -> float:
            for a, b2, n0 in _segs:
                if a <= r < b2:
                    return n0
            return 1.0

        prof = RadialProfile(
            direction=d,
            evaluator=ev,
            breakpoints=tuple(breaks),
            support_end=support,
            constant_segments=segments,
        )
    elif fld.kind in ("radially_stratified", "tabulated"):
        support = fld.radius if fld.kind == "radially_stratified" else fld.r_table[-1]
        breaks = (
            (support,)
            if fld.kind == "radially_stratified"
            else tuple(r for r in fld.r_table if 0 < r <= support)
        )

        def ev(r: float, _f=fld, _d=d) -> float:
            return _f.evaluate(r * _d)

        prof = RadialProfile(
            direction=d, evaluator=ev, breakpoints=breaks, support_end=support
        )
    else:
        raise ValueError(f"unknown medium kind {fld.kind!r}")

    n0 = prof(0.0)
    if abs(n0 - 1.0) > 1e-8:
        warnings.warn(
            f"n(0) = {n0:g} != 1; density normalization assumptions do not "
            "hold at the origin",
            NonUnitOriginIndexWarning,
            stacklevel=2,
        )
    return prof


def _segment_sqrt_integral(profile: RadialProfile, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    if profile.constant_segments is not None:
        covered = 0.0
        total = 0.0
        for lo, hi, n0 in profile.constant_segments:
            ov = min(b, hi) - max(a, lo)
            if ov > 0:
                total += math.sqrt(n0) * ov
                covered += ov
        # anything not covered by a segment is background, n = 1
        return total + ((b - a) - covered)
    val, _ = quad(lambda r: math.sqrt(profile(r)), a, b, epsabs=1e-12, epsrel=1e-12)
    return val


def travel_time(profile: RadialProfile, r: float) -> float:
    """B(r) = integral of sqrt(n) along the ray from 0 to r.

    Piecewise adaptive quadrature split at the breakpoints; for r beyond the
    support B grows linearly with slope 1. Per-profile segment integrals are
    cached.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    if r == 0.0:
        return 0.0
    se = profile.support_end
    if r >= se:
        return _travel_to_support(profile) + (r - se)
    nodes = [0.0] + [b for b in profile.breakpoints if b < r] + [r]
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        key = (a, b)
        if key not in profile._bcache:
            profile._bcache[key] = _segment_sqrt_integral(profile, a, b)
        total += profile._bcache[key]
    return total


def _travel_to_support(profile: RadialProfile) -> float:
    key = ("support",)
    if key not in profile._bcache:
        se = profile.support_end
        nodes = [0.0] + [b for b in profile.breakpoints if b < se] + [se]
        profile._bcache[key] = sum(
            _segment_sqrt_integral(profile, a, b) for a, b in zip(nodes, nodes[1:])
        )
    return profile._bcache[key]


def liouville_transform(
    profile: RadialProfile, samples: Sequence[tuple[float, complex]]
) -> list[tuple[float, complex]]:
    """Map (r, y) samples to (xi, z) with xi = B(r) and z = n(r)^{1/4} y."""
    rs = [r for r, _ in samples]
    if any(b < a for a, b in zip(rs, rs[1:])):
        raise ValueError("samples must be sorted in r")
    return [
        (travel_time(profile, r), profile(r) ** 0.25 * y) for r, y in samples
    ]
