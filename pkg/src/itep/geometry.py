"""Simple-domain geometry: ray/boundary intersection sets, tangent-point
filtering, the inside indicator, and covered ray length.

Domains are unions of balls and/or a generic implicit function F with F < 0
inside. Boundary points are classified outside (open-interior convention);
tangent contacts are dropped and the merged interval classified by sampling
its midpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SimpleDomain",
    "IntersectionSet",
    "TangencyUnresolved",
    "TooManyCrossings",
    "intersect_ray",
    "filter_tangent",
    "inside_indicator",
    "covered_length",
]

MAX_CROSSINGS = 64
_TANGENT_REL = 1e-8


class TangencyUnresolved(RuntimeError):
    """An implicit-F crossing could not be classified transversal/tangent."""


class TooManyCrossings(RuntimeError):
    """A ray crossed the boundary more often than the supported cap."""


@dataclass(frozen=True)
class SimpleDomain:
    """Union of balls and/or an implicit region {F < 0}, with a bounding
    radius strictly larger than the domain's extent from the origin."""

    balls: tuple[tuple[np.ndarray, float], ...] = ()
    implicit: Callable[[np.ndarray], float] | None = None
    bounding_radius: float = 10.0

    @staticmethod
    def from_balls(balls: Sequence[tuple], bounding_radius: float | None = None):
        out = tuple(
            (np.asarray(c, dtype=float), float(r)) for c, r in balls
        )
        if bounding_radius is None:
            extent = max(
                (float(np.linalg.norm(c)) + r for c, r in out), default=1.0
            )
            bounding_radius = 1.5 * extent
        for c, r in out:
            if float(np.linalg.norm(c)) + r >= bounding_radius:
                raise ValueError("bounding radius does not contain all balls")
        return SimpleDomain(balls=out, bounding_radius=bounding_radius)


@dataclass(frozen=True)
class IntersectionSet:
    """Ordered crossing radii of one ray with the boundary, plus alternating
    inside/outside labels for the induced intervals.

    ``parity[i]`` labels the interval between ``radii[i-1]`` and ``radii[i]``
    (with radii[-1] := 0 and radii[M] := bounding radius)."""

    direction: np.ndarray
    radii: tuple[float, ...]
    parity: tuple[bool, ...]

    def intervals(self, r_max: float) -> list[tuple[float, float, bool]]:
        edges = (0.0,) + self.radii + (r_max,)
        return [
            (a, b, flag)
            for a, b, flag in zip(edges, edges[1:], self.parity)
            if b > a
        ]


def inside_indicator(domain: SimpleDomain, point) -> bool:
    """True iff the point lies in the open interior of the union."""
    p = np.asarray(point, dtype=float)
    for c, r in domain.balls:
        if np.linalg.norm(p - c) < r:
            return True
    if domain.implicit is not None and domain.implicit(p) < 0:
        return True
    return False


def _unit(direction) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(d) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    return d


def _ball_crossings(domain: SimpleDomain, d: np.ndarray) -> list[float]:
    """Transversal crossing radii of the boundary of the ball *union*."""
    radii: list[float] = []
    candidates: list[float] = []
    for c, r in domain.balls:
        p = float(np.dot(d, c))
        q = float(np.dot(c, c)) - r * r
        disc = p * p - q
        scale = max(1.0, abs(q))
        if disc <= _TANGENT_REL * scale:
            continue  # miss, or tangent: disregarded
        rt = math.sqrt(disc)
        candidates.extend(v for v in (p - rt, p + rt) if v > 1e-12)
    # crossings of an individual ball interior to another ball are not
    # boundary points of the union
    for v in sorted(candidates):
        lo = inside_indicator(domain, (v - 1e-9) * d)
        hi = inside_indicator(domain, (v + 1e-9) * d)
        if lo != hi:
            radii.append(v)
    return radii


def _implicit_crossings(domain: SimpleDomain, d: np.ndarray) -> list[tuple[float, bool]]:
    """(radius, is_tangent) candidates from sign-change bracketing of F."""
    F = domain.implicit
    assert F is not None
    r_max = domain.bounding_radius
    h = r_max / 4096.0
    rs = np.arange(0.0, r_max + h, h)
    vals = np.array([F(r * d) for r in rs])
    out: list[tuple[float, bool]] = []
    for i in range(len(rs) - 1):
        a, b = rs[i], rs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            fa = F((a + 1e-12) * d)
        if fa * fb > 0:
            continue
        for _ in range(80):  # bisection to 1e-12
            m = 0.5 * (a + b)
            fm = F(m * d)
            if fa * fm <= 0:
                b, fb = m, fm
            else:
                a, fa = m, fm
            if b - a < 1e-13:
                break
        root = 0.5 * (a + b)
        # classify by the ray-directional derivative of F at the root
        eps = max(1e-7, 1e-7 * root)
        dfr = (F((root + eps) * d) - F((root - eps) * d)) / (2 * eps)
        gscale = abs(F((root + 64 * eps) * d) - F(root * d)) / (64 * eps)
        gscale = max(gscale, abs(dfr))
        if gscale == 0.0:
            raise TangencyUnresolved(
                f"cannot classify crossing at r = {root:g}: flat F"
            )
        out.append((root, abs(dfr) < _TANGENT_REL * gscale))
    return out


def filter_tangent(
    domain: SimpleDomain,
    direction,
    classified: Sequence[tuple[float, bool]],
) -> IntersectionSet:
    """Drop tangent crossings and label the induced intervals by sampling
    their midpoints."""
    d = _unit(direction)
    radii = tuple(r for r, tangent in classified if not tangent)
    if len(radii) > MAX_CROSSINGS:
        raise TooManyCrossings(
            f"{len(radii)} crossings exceed the cap of {MAX_CROSSINGS}"
        )
    edges = (0.0,) + radii + (domain.bounding_radius,)
    parity = tuple(
        inside_indicator(domain, 0.5 * (a + b) * d)
        for a, b in zip(edges, edges[1:])
    )
    return IntersectionSet(direction=d, radii=radii, parity=parity)


def intersect_ray(domain: SimpleDomain, direction) -> IntersectionSet:
    """All transversal crossings of the ray with the domain boundary,
    tangent points removed."""
    d = _unit(direction)
    classified: list[tuple[float, bool]] = [
        (r, False) for r in _ball_crossings(domain, d)
    ]
    if domain.implicit is not None:
        classified.extend(_implicit_crossings(domain, d))
    classified.sort()
    return filter_tangent(domain, d, classified)


def covered_length(domain: SimpleDomain, direction) -> float:
    """Lebesgue measure of the inside portion of the ray."""
    iset = intersect_ray(domain, direction)
    return sum(
        b - a for a, b, inside in iset.intervals(domain.bounding_radius) if inside
    )
