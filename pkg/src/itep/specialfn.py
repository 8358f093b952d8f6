"""Spherical Bessel functions for complex argument, associated Legendre
functions, and spherical harmonics.

The Bessel evaluator switches between three routes: closed forms for orders
0 and 1, a power series below the turning point ``|z| < l``, and a downward
(Miller) recurrence normalized against the closed-form orders otherwise.
Everything here is pure and stateless.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = [
    "spherical_bessel_j",
    "spherical_bessel_j_scaled",
    "spherical_bessel_j_prime",
    "spherical_bessel_j_array",
    "spherical_bessel_j_prime_array",
    "assoc_legendre",
    "spherical_harmonic",
]

# |Im z| beyond which the plain-valued API refuses to exponentiate and the
# caller must use the (mantissa, exponent) channel instead.
IM_GUARD = 600.0

_SERIES_TERMS = 80


def _scaled_trig(z: complex) -> tuple[complex, complex, float]:
    """sin(z) and cos(z) damped by exp(-|Im z|), plus the log of the factor
    taken out. Safe for arbitrarily large |Im z|."""
    x, y = z.real, z.imag
    ay = abs(y)
    # e^{iz} = e^{ix} e^{-y}; damp both exponentials by e^{-|y|}
    ep = cmath.exp(1j * x - (y + ay))   # e^{iz - |y|}
    em = cmath.exp(-1j * x + (y - ay))  # e^{-iz - |y|}
    s = (ep - em) / 2j
    c = (ep + em) / 2.0
    return s, c, ay


def _series_scaled(l: int, z: complex) -> tuple[complex, float]:
    """Power series for j_l around z = 0, convergent for |z| below the
    turning point. Returns (value, 0.0); the series never overflows for
    |z| < l <= l_max."""
    if z == 0:
        return (1.0 + 0.0j, 0.0) if l == 0 else (0.0j, 0.0)
    # j_l(z) = z^l sum_m (-z^2/2)^m / (m! (2l+2m+1)!!)
    w = -0.5 * z * z
    term = 1.0 + 0.0j
    total = term
    dfac = 1.0
    for m in range(1, _SERIES_TERMS):
        term *= w / (m * (2 * l + 2 * m + 1))
        total += term
        if abs(term) < 1e-18 * abs(total):
            break
    for j in range(1, l + 1):
        dfac *= 2 * j + 1
    # z^l / (2l+1)!! in log space to survive l up to ~32
    lead = l * cmath.log(z) - math.log(dfac)
    val = total * cmath.exp(lead)
    return val, 0.0


def _closed_scaled(l: int, z: complex) -> tuple[complex, float]:
    """j_0 or j_1 with the exp(|Im z|) factor split off."""
    s, c, ls = _scaled_trig(z)
    if l == 0:
        return s / z, ls
    return s / (z * z) - c / z, ls


def spherical_bessel_j_scaled(l: int, z: complex) -> tuple[complex, float]:
    """j_l(z) as (mantissa, log_scale): the true value is
    ``mantissa * exp(log_scale)``. This channel stays finite for any
    |Im z| representable in a double."""
    if l < 0:
        raise ValueError("order must be nonnegative")
    z = complex(z)
    if z == 0:
        return (1.0 + 0.0j, 0.0) if l == 0 else (0.0j, 0.0)
    az = abs(z)
    if l == 1 and az < 0.5:
        # the closed form cancels catastrophically near the origin
        return _series_scaled(l, z)
    if l <= 1:
        return _closed_scaled(l, z)
    # keep the series strictly below the turning point, where its terms
    # stay small and no cancellation builds up
    if az < 0.8 * l:
        return _series_scaled(l, z)
    return _miller_scaled(l, z)


def _miller_scaled(l: int, z: complex) -> tuple[complex, float]:
    # start far enough above the turning point |z| that the contaminating
    # second-kind component decays below double precision before order l
    az = abs(z)
    l_start = max(l, math.ceil(az)) + 30 + int(3.0 * az ** (1.0 / 3.0))
    fp = 0.0j                   # f_{n+1}
    fc = 1e-150 + 0.0j          # f_n (arbitrary seed)
    f_l = 0.0j
    for n in range(l_start, 0, -1):
        fm = (2 * n + 1) / z * fc - fp
        fp, fc = fc, fm
        if n - 1 == l:
            f_l = fc
        if abs(fc) > 1e250:
            fp /= 1e250
            fc /= 1e250
            if n - 1 <= l:
                f_l /= 1e250
    # fc = f_0, fp = f_1 after the loop; normalize against whichever
    # closed-form order is farther from a zero
    j0, ls = _closed_scaled(0, z)
    j1, _ = _closed_scaled(1, z)
    if abs(j0) >= abs(j1):
        ratio = j0 / fc
    else:
        ratio = j1 / fp
    return f_l * ratio, ls


def spherical_bessel_j(l: int, z: complex) -> complex:
    """Spherical Bessel function of the first kind, complex argument.

    Raises OverflowError when |Im z| exceeds the guard bound; use
    :func:`spherical_bessel_j_scaled` there.
    """
    z = complex(z)
    if abs(z.imag) > IM_GUARD:
        raise OverflowError(
            f"|Im z| = {abs(z.imag):g} exceeds guard {IM_GUARD:g}; "
            "use spherical_bessel_j_scaled"
        )
    val, ls = spherical_bessel_j_scaled(l, z)
    return val * math.exp(ls) if ls else val


def spherical_bessel_j_prime(l: int, z: complex) -> complex:
    """d/dz j_l(z) via j_l' = j_{l-1} - ((l+1)/z) j_l; closed form at l=0."""
    z = complex(z)
    if l == 0:
        if z == 0:
            return 0.0j
        s, c, ls = _scaled_trig(z)
        return (c / z - s / (z * z)) * math.exp(ls)
    if z == 0:
        # j_l ~ z^l/(2l+1)!!, so the derivative vanishes at 0 for l >= 2
        return (1.0 / 3.0 + 0.0j) if l == 1 else 0.0j
    return spherical_bessel_j(l - 1, z) - (l + 1) / z * spherical_bessel_j(l, z)


def spherical_bessel_j_array(l: int, zs: np.ndarray) -> np.ndarray:
    """Vectorized j_l over an array of complex arguments."""
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(zs.shape, dtype=complex)
    flat = zs.ravel()
    res = out.ravel()
    for i, z in enumerate(flat):
        res[i] = spherical_bessel_j(l, z)
    return out


def spherical_bessel_j_prime_array(l: int, zs: np.ndarray) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex)
    out = np.empty(zs.shape, dtype=complex)
    flat = zs.ravel()
    res = out.ravel()
    for i, z in enumerate(flat):
        res[i] = spherical_bessel_j_prime(l, z)
    return out


def assoc_legendre(l: int, m: int, t: float) -> float:
    """Associated Legendre function P_l^m(t) = (1-t^2)^{m/2} d^m P_l/dt^m,
    without the Condon-Shortley phase. Upward recurrence in l from P_m^m."""
    if m < 0 or m > l:
        raise ValueError("require 0 <= m <= l")
    if abs(t) > 1.0:
        raise ValueError("require |t| <= 1")
    # P_m^m = (2m-1)!! (1-t^2)^{m/2}
    pmm = 1.0
    if m > 0:
        s2 = (1.0 - t) * (1.0 + t)
        fact = 1.0
        for _ in range(m):
            pmm *= fact * math.sqrt(s2)
            fact += 2.0
    if l == m:
        return pmm
    pm1 = t * (2 * m + 1) * pmm  # P_{m+1}^m
    if l == m + 1:
        return pm1
    for n in range(m + 2, l + 1):
        pn = ((2 * n - 1) * t * pm1 - (n + m - 1) * pmm) / (n - m)
        pmm, pm1 = pm1, pn
    return pm1


def spherical_harmonic(l: int, m: int, theta: float, phi: float) -> complex:
    """Orthonormal spherical harmonic Y_l^m(theta, phi) with |m| in both the
    factorial ratio and the Legendre factor, phase e^{i m phi}."""
    if abs(m) > l:
        raise ValueError("require |m| <= l")
    if not 0.0 <= theta <= math.pi + 1e-12:
        raise ValueError("require 0 <= theta <= pi")
    am = abs(m)
    # factorial ratio in log space so l up to 32 cannot overflow
    lognorm = 0.5 * (
        math.log((2 * l + 1) / (4.0 * math.pi))
        + math.lgamma(l - am + 1)
        - math.lgamma(l + am + 1)
    )
    plm = assoc_legendre(l, am, math.cos(theta))
    return math.exp(lognorm) * plm * cmath.exp(1j * m * phi)
