"""Integration of the radial equation

    y'' + (k^2 n(r) - l(l+1)/r^2) y = 0

for complex k, with origin (Frobenius-normalized) or interface-matching
initial data, plus mode-pair reconstruction.

The workhorse is an embedded Dormand-Prince 5(4) pair run in lockstep over a
batch of wavenumbers: every k in the batch shares the step sequence, with
the error controlled by the worst member. Piecewise-constant profiles go
through a numba kernel; general profiles use a numpy stepper. A fixed-mesh
variant (steps planned from |k| alone) keeps the computed solution an
analytic function of k, which the zero clustering in :mod:`itep.spectra`
relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .medium import RadialProfile
from .specialfn import (
    spherical_bessel_j_array,
    spherical_bessel_j_prime_array,
    spherical_harmonic,
)

__all__ = [
    "RadialSolution",
    "StepUnderflow",
    "solve_from_origin",
    "solve_from_interface",
    "endpoint_from_origin",
    "endpoint_from_interface",
    "interface_data",
    "eval_mode_pair",
]

R_EPS = 1e-4          # Frobenius start radius for l >= 1
DEFAULT_RTOL = 1e-11


class StepUnderflow(RuntimeError):
    """Adaptive step shrank below 1e-14 of the integration span."""


# Dormand-Prince 5(4) coefficients
_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)


@njit(cache=True)
def _dp54_const(y, v, k2n, c, a, b, rtol, fixed_steps):  # pragma: no cover
    """Advance the batch states (y, v) from r=a to r=b with constant k^2 n.

    k2n is the per-k array of k^2 * n on the segment; c = l(l+1). If
    fixed_steps > 0 the mesh is uniform-in-phase with that many steps and no
    error control. Returns 0 on success, 1 on step underflow.
    """
    n = y.shape[0]
    span = b - a
    if span == 0.0:
        return 0
    direction = 1.0 if span > 0 else -1.0
    # frequency scale for the error norm and the initial step
    wmax = 0.0
    for i in range(n):
        w = abs(k2n[i]) ** 0.5
        if w > wmax:
            wmax = w
    r = a
    if fixed_steps > 0:
        h = span / fixed_steps
    else:
        rr = abs(a) if abs(a) > 1e-300 else abs(b)
        w0 = (wmax * wmax + (c / (rr * rr) if rr > 0 else 0.0)) ** 0.5
        h = direction * min(abs(span), 0.5 / (w0 + 1e-300), abs(span) / 4.0)
        if h == 0.0:
            h = span
    hmin = 1e-14 * abs(span)
    k1y = np.empty(n, np.complex128)
    k1v = np.empty(n, np.complex128)
    steps_done = 0
    while (b - r) * direction > 1e-300:
        if fixed_steps > 0:
            h = span / fixed_steps
            if steps_done == fixed_steps:
                break
        if (r + h - b) * direction > 0.0:
            h = b - r
        # stage 1
        for i in range(n):
            rr = r
            coef = c / (rr * rr) - k2n[i] if rr != 0.0 else -k2n[i]
            k1y[i] = v[i]
            k1v[i] = coef * y[i]
        # stages 2..7 unrolled via small arrays
        k2y = np.empty(n, np.complex128); k2v = np.empty(n, np.complex128)
        k3y = np.empty(n, np.complex128); k3v = np.empty(n, np.complex128)
        k4y = np.empty(n, np.complex128); k4v = np.empty(n, np.complex128)
        k5y = np.empty(n, np.complex128); k5v = np.empty(n, np.complex128)
        k6y = np.empty(n, np.complex128); k6v = np.empty(n, np.complex128)
        k7y = np.empty(n, np.complex128); k7v = np.empty(n, np.complex128)

        r2 = r + 0.2 * h
        coef_r = c / (r2 * r2) if r2 != 0.0 else 0.0
        for i in range(n):
            yy = y[i] + h * 0.2 * k1y[i]
            vv = v[i] + h * 0.2 * k1v[i]
            k2y[i] = vv
            k2v[i] = (coef_r - k2n[i]) * yy
        r3 = r + 0.3 * h
        coef_r = c / (r3 * r3) if r3 != 0.0 else 0.0
        for i in range(n):
            yy = y[i] + h * (3 / 40 * k1y[i] + 9 / 40 * k2y[i])
            vv = v[i] + h * (3 / 40 * k1v[i] + 9 / 40 * k2v[i])
            k3y[i] = vv
            k3v[i] = (coef_r - k2n[i]) * yy
        r4 = r + 0.8 * h
        coef_r = c / (r4 * r4) if r4 != 0.0 else 0.0
        for i in range(n):
            yy = y[i] + h * (44 / 45 * k1y[i] - 56 / 15 * k2y[i] + 32 / 9 * k3y[i])
            vv = v[i] + h * (44 / 45 * k1v[i] - 56 / 15 * k2v[i] + 32 / 9 * k3v[i])
            k4y[i] = vv
            k4v[i] = (coef_r - k2n[i]) * yy
        r5 = r + 8 / 9 * h
        coef_r = c / (r5 * r5) if r5 != 0.0 else 0.0
        for i in range(n):
            yy = y[i] + h * (19372 / 6561 * k1y[i] - 25360 / 2187 * k2y[i]
                             + 64448 / 6561 * k3y[i] - 212 / 729 * k4y[i])
            vv = v[i] + h * (19372 / 6561 * k1v[i] - 25360 / 2187 * k2v[i]
                             + 64448 / 6561 * k3v[i] - 212 / 729 * k4v[i])
            k5y[i] = vv
            k5v[i] = (coef_r - k2n[i]) * yy
        r6 = r + h
        coef_r = c / (r6 * r6) if r6 != 0.0 else 0.0
        for i in range(n):
            yy = y[i] + h * (9017 / 3168 * k1y[i] - 355 / 33 * k2y[i]
                             + 46732 / 5247 * k3y[i] + 49 / 176 * k4y[i]
                             - 5103 / 18656 * k5y[i])
            vv = v[i] + h * (9017 / 3168 * k1v[i] - 355 / 33 * k2v[i]
                             + 46732 / 5247 * k3v[i] + 49 / 176 * k4v[i]
                             - 5103 / 18656 * k5v[i])
            k6y[i] = vv
            k6v[i] = (coef_r - k2n[i]) * yy
        maxerr = 0.0
        for i in range(n):
            ynew = y[i] + h * (35 / 384 * k1y[i] + 500 / 1113 * k3y[i]
                               + 125 / 192 * k4y[i] - 2187 / 6784 * k5y[i]
                               + 11 / 84 * k6y[i])
            vnew = v[i] + h * (35 / 384 * k1v[i] + 500 / 1113 * k3v[i]
                               + 125 / 192 * k4v[i] - 2187 / 6784 * k5v[i]
                               + 11 / 84 * k6v[i])
            k7y[i] = vnew
            k7v[i] = (coef_r - k2n[i]) * ynew
            ey = h * (71 / 57600 * k1y[i] - 71 / 16695 * k3y[i]
                      + 71 / 1920 * k4y[i] - 17253 / 339200 * k5y[i]
                      + 22 / 525 * k6y[i] - 1 / 40 * k7y[i])
            ev = h * (71 / 57600 * k1v[i] - 71 / 16695 * k3v[i]
                      + 71 / 1920 * k4v[i] - 17253 / 339200 * k5v[i]
                      + 22 / 525 * k6v[i] - 1 / 40 * k7v[i])
            w = (abs(k2n[i]) + (c / (r6 * r6) if r6 != 0.0 else 0.0)) ** 0.5
            if w < 1e-300:
                w = 1.0
            sc = abs(ynew) + abs(vnew) / w + 1e-300
            err = (abs(ey) + abs(ev) / w) / sc
            if err > maxerr:
                maxerr = err
            k2y[i] = ynew  # reuse as scratch for the accepted state
            k2v[i] = vnew
        if fixed_steps > 0 or maxerr <= rtol:
            for i in range(n):
                y[i] = k2y[i]
                v[i] = k2v[i]
            r = r + h
            steps_done += 1
        if fixed_steps == 0:
            fac = 0.9 * (rtol / (maxerr + 1e-300)) ** 0.2
            if fac > 5.0:
                fac = 5.0
            if fac < 0.2:
                fac = 0.2
            h = h * fac
            if abs(h) < hmin:
                return 1
    return 0


def _rhs_general(profile, r, c, k2, y, v):
    nr = profile(float(r))
    coef = (c / (r * r) if r != 0.0 else 0.0) - k2 * nr
    return v, coef * y


def _dp54_general(y, v, k2, c, profile, a, b, rtol, record=None):
    """Numpy lockstep stepper for a general (callable) profile segment."""
    span = b - a
    if span == 0.0:
        return
    direction = 1.0 if span > 0 else -1.0
    wmax = float(np.max(np.abs(k2)) ** 0.5) * math.sqrt(
        max(1.0, profile.n_max())
    )
    rr = abs(a) if a != 0.0 else abs(b)
    w0 = math.sqrt(wmax**2 + (c / rr**2 if rr > 0 else 0.0))
    h = direction * min(abs(span), 0.5 / (w0 + 1e-300), abs(span) / 4.0)
    hmin = 1e-14 * abs(span)
    r = a
    while (b - r) * direction > 1e-300:
        if (r + h - b) * direction > 0.0:
            h = b - r
        ky = [None] * 7
        kv = [None] * 7
        ky[0], kv[0] = _rhs_general(profile, r, c, k2, y, v)
        for s in range(1, 6):
            yy = y.copy()
            vv = v.copy()
            for j, aij in enumerate(_A[s - 1]):
                if aij != 0.0:
                    yy += h * aij * ky[j]
                    vv += h * aij * kv[j]
            ky[s], kv[s] = _rhs_general(profile, r + _C[s] * h, c, k2, yy, vv)
        ynew = y.copy()
        vnew = v.copy()
        for j, bj in enumerate(_A[5]):
            if bj != 0.0:
                ynew += h * bj * ky[j]
                vnew += h * bj * kv[j]
        ky[6], kv[6] = _rhs_general(profile, r + h, c, k2, ynew, vnew)
        ey = np.zeros_like(y)
        ev = np.zeros_like(v)
        for j, e in enumerate(_E):
            if e != 0.0:
                ey += h * e * ky[j]
                ev += h * e * kv[j]
        r6 = r + h
        w = np.sqrt(
            np.abs(k2) * profile(float(r6)) + (c / r6**2 if r6 != 0.0 else 0.0)
        )
        w = np.maximum(w, 1e-300)
        sc = np.abs(ynew) + np.abs(vnew) / w + 1e-300
        err = float(np.max((np.abs(ey) + np.abs(ev) / w) / sc))
        if err <= rtol:
            y[:] = ynew
            v[:] = vnew
            r = r6
            if record is not None:
                record.append((r, ynew.copy(), vnew.copy()))
        fac = min(5.0, max(0.2, 0.9 * (rtol / (err + 1e-300)) ** 0.2))
        h *= fac
        if abs(h) < hmin:
            raise StepUnderflow(f"step underflow at r = {r:g}")


def _segments(profile: RadialProfile, r0: float, r1: float):
    """Split [r0, r1] (either orientation) at the profile breakpoints,
    yielding (a, b, n_const_or_None)."""
    lo, hi = (r0, r1) if r0 <= r1 else (r1, r0)
    cuts = [lo] + [
        b for b in profile.breakpoints if lo < b < hi
    ] + ([profile.support_end] if lo < profile.support_end < hi else []) + [hi]
    cuts = sorted(set(cuts))
    segs = []
    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        nval = None
        if mid >= profile.support_end:
            nval = 1.0
        elif profile.constant_segments is not None:
            for sa, sb, n0 in profile.constant_segments:
                if sa <= mid < sb:
                    nval = n0
                    break
            else:
                nval = 1.0
        segs.append((a, b, nval))
    if r0 > r1:
        segs = [(b, a, nv) for a, b, nv in reversed(segs)]
    return segs


def _plan_steps(l: int, a: float, b: float, wmax: float, rtol: float) -> int:
    """Step count for the fixed-mesh mode, from the worst phase rate on the
    segment. Calibrated so the local error stays near the adaptive target."""
    c = l * (l + 1)
    rmin = min(abs(a), abs(b))
    rmax = max(abs(a), abs(b))
    if rmin == 0.0:
        rmin = 1e-3 * rmax
    weff = math.sqrt(wmax**2 + c / rmin**2)
    q = 1.4 * rtol**0.2  # phase advance per step
    return max(8, int(math.ceil(abs(b - a) * weff / q)))


def integrate_batch(
    l: int,
    ks: np.ndarray,
    profile: RadialProfile,
    r0: float,
    r1: float,
    y0: np.ndarray,
    v0: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    fixed_mesh: bool = False,
    wplan: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Advance the batch initial data (y0, v0) from r0 to r1.

    With ``fixed_mesh`` the step sequence depends only on (l, segment
    layout, rtol, wplan), never on the state, so the result is analytic in
    each k of the batch; wplan defaults to the worst |k| sqrt(n) present.
    """
    ks = np.asarray(ks, dtype=complex)
    y = np.array(y0, dtype=complex, copy=True)
    v = np.array(v0, dtype=complex, copy=True)
    c = float(l * (l + 1))
    k2 = ks * ks
    for a, b, nval in _segments(profile, r0, r1):
        if nval is not None:
            if fixed_mesh:
                if wplan is None:
                    wplan = float(np.max(np.abs(ks))) * math.sqrt(nval)
                nsteps = _plan_steps(l, a, b, wplan * math.sqrt(nval), rtol)
                status = _dp54_const(y, v, k2 * nval, c, a, b, rtol, nsteps)
            else:
                status = _dp54_const(y, v, k2 * nval, c, a, b, rtol, 0)
            if status != 0:
                raise StepUnderflow(f"step underflow in [{a:g}, {b:g}]")
        else:
            _dp54_general(y, v, k2, c, profile, a, b, rtol)
    return y, v


def _origin_data(l: int, ks: np.ndarray, n0: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Frobenius-normalized start (r_start, y, v) near the origin."""
    ks = np.asarray(ks, dtype=complex)
    if l == 0:
        return 0.0, np.zeros_like(ks), np.ones_like(ks)
    re = R_EPS
    w = -(ks * ks) * n0
    c1 = w / (2.0 * (2 * l + 3))
    c2 = w * c1 / (4.0 * (2 * l + 5))
    r2 = re * re
    y = re ** (l + 1) * (1.0 + c1 * r2 + c2 * r2 * r2)
    v = re**l * ((l + 1) + (l + 3) * c1 * r2 + (l + 5) * c2 * r2 * r2)
    return re, y, v


def interface_data(l: int, ks: np.ndarray, r_start: float) -> tuple[np.ndarray, np.ndarray]:
    """Matching data at an interface: y = r j_l(kr), y' = j_l(kr) + kr j_l'(kr)
    (unit mode amplitudes on both sides)."""
    ks = np.asarray(ks, dtype=complex)
    z = ks * r_start
    j = spherical_bessel_j_array(l, z)
    jp = spherical_bessel_j_prime_array(l, z)
    y = r_start * j
    v = j + ks * r_start * jp
    return y, v


def endpoint_from_origin(
    l: int,
    ks: np.ndarray,
    profile: RadialProfile,
    r_end: float,
    rtol: float = DEFAULT_RTOL,
    fixed_mesh: bool = False,
    wplan: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(y, y') at r_end for the origin-regular solution, for a batch of k."""
    if r_end <= 0:
        raise ValueError("r_end must be positive")
    ks = np.asarray(ks, dtype=complex)
    r0, y, v = _origin_data(l, ks, profile(0.0))
    return integrate_batch(
        l, ks, profile, r0, r_end, y, v, rtol, fixed_mesh, wplan
    )


def endpoint_from_interface(
    l: int,
    ks: np.ndarray,
    profile: RadialProfile,
    r_start: float,
    r_end: float,
    rtol: float = DEFAULT_RTOL,
    fixed_mesh: bool = False,
    wplan: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(y, y') at r_end for the interface-matched solution started at
    r_start; integrates in either direction."""
    if r_start <= 0 or r_start == r_end:
        raise ValueError("need 0 < r_start != r_end")
    ks = np.asarray(ks, dtype=complex)
    y, v = interface_data(l, ks, r_start)
    return integrate_batch(
        l, ks, profile, r_start, r_end, y, v, rtol, fixed_mesh, wplan
    )


@dataclass
class RadialSolution:
    """Dense solution of the radial equation for one (l, k): node radii with
    (y, y') values and cubic-Hermite evaluation in between."""

    l: int
    k: complex
    interval: tuple[float, float]
    rs: np.ndarray
    ys: np.ndarray
    vs: np.ndarray

    def __call__(self, r: float) -> tuple[complex, complex]:
        rs = self.rs
        lo, hi = min(rs[0], rs[-1]), max(rs[0], rs[-1])
        if not (lo - 1e-12 <= r <= hi + 1e-12):
            raise ValueError(f"r = {r:g} outside [{lo:g}, {hi:g}]")
        order = np.argsort(rs)
        rss, yss, vss = rs[order], self.ys[order], self.vs[order]
        i = int(np.clip(np.searchsorted(rss, r) - 1, 0, len(rss) - 2))
        h = rss[i + 1] - rss[i]
        if h == 0:
            return yss[i], vss[i]
        t = (r - rss[i]) / h
        h00 = (1 + 2 * t) * (1 - t) ** 2
        h10 = t * (1 - t) ** 2
        h01 = t * t * (3 - 2 * t)
        h11 = t * t * (t - 1)
        y = h00 * yss[i] + h10 * h * vss[i] + h01 * yss[i + 1] + h11 * h * vss[i + 1]
        # derivative of the Hermite interpolant
        d00 = 6 * t * (t - 1) / h
        d10 = (1 - 4 * t + 3 * t * t)
        d01 = -d00
        d11 = t * (3 * t - 2)
        v = d00 * yss[i] + d10 * vss[i] + d01 * yss[i + 1] + d11 * vss[i + 1]
        return complex(y), complex(v)


def _solve_dense(l, k, profile, r0, r1, y0, v0, rtol) -> RadialSolution:
    k_arr = np.array([k], dtype=complex)
    c = float(l * (l + 1))
    k2 = k_arr * k_arr
    y = np.array([y0], dtype=complex)
    v = np.array([v0], dtype=complex)
    rs = [r0]
    ys = [complex(y[0])]
    vs = [complex(v[0])]
    for a, b, _nval in _segments(profile, r0, r1):
        record: list = []
        _dp54_general(y, v, k2, c, profile, a, b, rtol, record=record)
        for r, yy, vv in record:
            rs.append(r)
            ys.append(complex(yy[0]))
            vs.append(complex(vv[0]))
    return RadialSolution(
        l=l,
        k=complex(k),
        interval=(min(r0, r1), max(r0, r1)),
        rs=np.array(rs),
        ys=np.array(ys),
        vs=np.array(vs),
    )


def solve_from_origin(
    l: int,
    k: complex,
    profile: RadialProfile,
    r_end: float,
    rtol: float = DEFAULT_RTOL,
) -> RadialSolution:
    """Dense origin-regular solution on [0 (or the Frobenius start), r_end].

    l = 0 starts exactly at the origin with y(0) = 0, y'(0) = 1; l >= 1
    starts at R_EPS with the r^{l+1} normalization plus its second-order
    series correction in k^2 n(0)."""
    if r_end <= 0:
        raise ValueError("r_end must be positive")
    ks = np.array([k], dtype=complex)
    r0, y, v = _origin_data(l, ks, profile(0.0))
    return _solve_dense(l, k, profile, r0, r_end, y[0], v[0], rtol)


def solve_from_interface(
    l: int,
    k: complex,
    profile: RadialProfile,
    r_start: float,
    r_end: float,
    rtol: float = DEFAULT_RTOL,
) -> RadialSolution:
    """Dense interface-matched solution from r_start toward r_end (either
    direction)."""
    if r_start <= 0 or r_start == r_end:
        raise ValueError("need 0 < r_start != r_end")
    ks = np.array([k], dtype=complex)
    y, v = interface_data(l, ks, r_start)
    return _solve_dense(l, k, profile, r_start, r_end, y[0], v[0], rtol)


def eval_mode_pair(
    idx: tuple[int, int],
    k: complex,
    coeffs: tuple[complex, complex],
    sol: RadialSolution,
    point: tuple[float, float, float],
) -> tuple[complex, complex]:
    """Mode pair at (r, theta, phi): the free-space member a j_l(kr) Y_l^m
    and the medium member b (y(r)/r) Y_l^m."""
    l, m = idx
    a, b = coeffs
    r, theta, phi = point
    Y = spherical_harmonic(l, m, theta, phi)
    j = spherical_bessel_j_array(l, np.array([k * r]))[0]
    y, _ = sol(r)
    vval = a * j * Y
    wval = b * (y / r) * Y if r != 0 else 0.0j
    return vval, wval
