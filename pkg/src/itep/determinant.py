"""The functional determinant D_l(k; r) whose zeros are the per-ray
transmission eigenvalues, its overflow-normalized form for root finding,
and the alpha diagnostic that vanishes exactly on background-only rays.

D_l couples the free radial factor j_l(kr) with the medium solution y(r; k):

    D_l(k; r) = -j_l(kr) y'/r + j_l(kr) y/r^2 + k j_l'(kr) y/r

The normalized channel divides out exp((r + B(r)) |Im k|), the exponential
type of D_l as an entire function of k, so root finding never overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .medium import RadialProfile, travel_time
from .radial_ode import (
    DEFAULT_RTOL,
    endpoint_from_interface,
    endpoint_from_origin,
)
from .specialfn import (
    spherical_bessel_j_array,
    spherical_bessel_j_prime_array,
)

__all__ = [
    "DeterminantValue",
    "DeterminantFunction",
    "PoleProximity",
    "determinant",
    "determinant_function",
    "alpha_diagnostic",
]

_BATCH_SPAN = 2.0   # max ratio of |k| within one lockstep batch
_BATCH_MAX = 4096


class PoleProximity(RuntimeError):
    """k is too close to a pole of the alpha diagnostic to be meaningful."""


@dataclass(frozen=True)
class DeterminantValue:
    """Normalized determinant: the true value is value * exp(log_scale)."""

    value: complex
    log_scale: float

    def raw(self) -> complex:
        return self.value * math.exp(self.log_scale)


def _assemble(l, ks, r_hat, y, v):
    z = ks * r_hat
    j = spherical_bessel_j_array(l, z)
    jp = spherical_bessel_j_prime_array(l, z)
    return -j * v / r_hat + j * y / r_hat**2 + ks * jp * y / r_hat


class DeterminantFunction:
    """k -> D_l(k; r_hat) as a referentially transparent callable.

    Scalar calls return :class:`DeterminantValue`; :meth:`values` evaluates a
    batch of k in lockstep. Results are cached per exact complex k, so
    repeated calls are bitwise-identical regardless of batch composition.
    """

    def __init__(
        self,
        l: int,
        profile: RadialProfile,
        r_hat: float,
        start="origin",
        rtol: float = DEFAULT_RTOL,
    ):
        if r_hat <= 0:
            raise ValueError("r_hat must be positive")
        self.l = l
        self.profile = profile
        self.r_hat = float(r_hat)
        self.start = start
        self.rtol = rtol
        self.type_constant = self.r_hat + travel_time(profile, self.r_hat)
        self._cache: dict[complex, complex] = {}

    # -- evaluation ------------------------------------------------------

    def _endpoint(self, ks: np.ndarray, fixed_mesh=False, wplan=None):
        if self.start == "origin":
            return endpoint_from_origin(
                self.l, ks, self.profile, self.r_hat, self.rtol,
                fixed_mesh=fixed_mesh, wplan=wplan,
            )
        kind, r0 = self.start
        if kind != "interface":
            raise ValueError(f"unknown start {self.start!r}")
        return endpoint_from_interface(
            self.l, ks, self.profile, r0, self.r_hat, self.rtol,
            fixed_mesh=fixed_mesh, wplan=wplan,
        )

    def _eval_batch(self, ks: np.ndarray) -> np.ndarray:
        """Normalized determinant values for one lockstep batch."""
        ks = np.asarray(ks, dtype=complex)
        safe = np.where(ks == 0, 1e-30 + 0j, ks)  # k = 0 is a removable point
        y, v = self._endpoint(safe)
        raw = _assemble(self.l, safe, self.r_hat, y, v)
        return raw * np.exp(-self.type_constant * np.abs(safe.imag))

    def values(self, ks) -> np.ndarray:
        """Normalized values over an array of k, cached and batched by
        magnitude so small-|k| points never pay large-|k| step counts."""
        ks = np.asarray(ks, dtype=complex).ravel()
        out = np.empty(ks.shape, dtype=complex)
        missing = [i for i, k in enumerate(ks) if complex(k) not in self._cache]
        if missing:
            order = sorted(missing, key=lambda i: abs(ks[i]))
            chunk: list[int] = []
            kmin = None
            for i in order:
                ak = abs(ks[i])
                if chunk and (
                    len(chunk) >= _BATCH_MAX
                    or (kmin > 0 and ak > _BATCH_SPAN * max(kmin, 1.0))
                ):
                    self._flush(ks, chunk)
                    chunk, kmin = [], None
                if not chunk:
                    kmin = ak
                chunk.append(i)
            if chunk:
                self._flush(ks, chunk)
        for i, k in enumerate(ks):
            out[i] = self._cache[complex(k)]
        return out

    def _flush(self, ks, idx):
        vals = self._eval_batch(ks[idx])
        for i, v in zip(idx, vals):
            self._cache[complex(ks[i])] = complex(v)

    def analytic_values(self, ks, wplan: float, log_shift: float = 0.0) -> np.ndarray:
        """Fixed-mesh evaluation: within one call the computed map k -> value
        is analytic (the step sequence is planned from wplan alone, and the
        rescale exp(log_shift) is a constant, unlike the per-k normalization
        of values() which is not analytic in k). Used by the cluster
        refinement; not cached."""
        ks = np.asarray(ks, dtype=complex).ravel()
        safe = np.where(ks == 0, 1e-30 + 0j, ks)
        y, v = self._endpoint(safe, fixed_mesh=True, wplan=wplan)
        raw = _assemble(self.l, safe, self.r_hat, y, v)
        return raw * math.exp(log_shift)

    def log_scale(self, ks) -> np.ndarray:
        ks = np.asarray(ks, dtype=complex)
        return self.type_constant * np.abs(ks.imag)

    def __call__(self, k: complex) -> DeterminantValue:
        val = self.values(np.array([k]))[0]
        return DeterminantValue(
            value=complex(val),
            log_scale=self.type_constant * abs(complex(k).imag),
        )


def determinant_function(
    l: int,
    profile: RadialProfile,
    r_hat: float,
    start="origin",
    rtol: float = DEFAULT_RTOL,
) -> DeterminantFunction:
    """Package the determinant as a closure over (l, profile, r_hat, start)."""
    return DeterminantFunction(l, profile, r_hat, start, rtol)


def determinant(
    l: int,
    k: complex,
    r_hat: float,
    profile: RadialProfile,
    start="origin",
    rtol: float = DEFAULT_RTOL,
) -> DeterminantValue:
    """Single determinant evaluation; see :class:`DeterminantFunction`."""
    return determinant_function(l, profile, r_hat, start, rtol)(k)


def alpha_diagnostic(
    l: int,
    k: complex,
    r_hat: float,
    profile: RadialProfile,
    rtol: float = DEFAULT_RTOL,
) -> complex:
    """alpha_l(k) = 1 - (1/k) (j_l/j_l') (u'/u) with u = y/r the medium mode
    factor. Identically zero iff n = 1 along the ray; meaningless near the
    poles (zeros of j_l'(k r) or of u), where PoleProximity is raised."""
    k = complex(k)
    if k == 0:
        raise PoleProximity("alpha undefined at k = 0")
    ks = np.array([k])
    y, v = endpoint_from_origin(l, ks, profile, r_hat, rtol)
    y, v = y[0], v[0]
    z = k * r_hat
    j = spherical_bessel_j_array(l, np.array([z]))[0]
    jp = spherical_bessel_j_prime_array(l, np.array([z]))[0]
    # j_l'' from the defining ODE, for the pole-distance estimate
    jpp = -2 * jp / z - (1 - l * (l + 1) / z**2) * j
    dist_jp = abs(jp) / (abs(jpp) * r_hat + 1e-300)
    u = y / r_hat
    up = v / r_hat - y / r_hat**2
    amp = abs(u) + abs(up) / max(abs(k), 1e-300)
    btot = r_hat + travel_time(profile, r_hat)
    dist_u = abs(u) / (btot * amp + 1e-300)
    if dist_jp < 1e-6 or dist_u < 1e-6:
        raise PoleProximity(
            f"k = {k} within ~1e-6 of a pole of alpha_{l} at r = {r_hat:g}"
        )
    return 1.0 - (j / jp) * (up / u) / k
