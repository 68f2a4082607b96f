"""The Poincaré disk with arbitrary-precision points.

Orbits of hyperbolic maps approach the unit circle exponentially fast, so
points are ``mpmath.mpc`` values and every computation runs at the disk's
working precision (``dps`` decimal digits). Points serialize as
``[re, im]`` pairs of decimal strings.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np
from mpmath import mp

from ..core import POINT_TOL, MetricFunctional, Space
from ..exceptions import DomainError, ParameterError
from ..linalg import sigma_max

DEFAULT_DPS = 30


def to_mpc(z):
    if isinstance(z, mpmath.mpc):
        return z
    if isinstance(z, (list, tuple)) and len(z) == 2:
        return mp.mpc(mp.mpf(z[0]), mp.mpf(z[1]))
    if isinstance(z, np.generic):
        z = z.item()
    return mp.mpc(z)


def _dist(z, w):
    num = abs(z - w)
    den = abs(1 - mp.conj(z) * w)
    sz = 1 - (z.real ** 2 + z.imag ** 2)
    sw = 1 - (w.real ** 2 + w.imag ** 2)
    # (den - num)(den + num) = (1 - |z|^2)(1 - |w|^2)
    d = 2 * mp.log(den + num) - mp.log(sz) - mp.log(sw)
    return max(float(d), 0.0)


class PoincareDisk(Space):
    """Unit disk with the metric ``2|dz| / (1 - |z|^2)``, based at 0."""

    name = "poincare-disk"
    symmetric = True

    def __init__(self, dps: int = DEFAULT_DPS):
        if int(dps) < 15:
            raise ParameterError("dps must be at least 15")
        self.dps = int(dps)

    def describe(self):
        return {"type": self.name, "dps": self.dps}

    @property
    def base_point(self):
        return mp.mpc(0)

    def context(self):
        return mp.workdps(max(self.dps, mp.dps))

    def with_precision(self, dps: int) -> "PoincareDisk":
        return PoincareDisk(dps)

    @staticmethod
    def precision_for(horizon: int, step: float) -> int:
        """Digits needed to resolve ``horizon`` steps of size ``step``.

        ``1 - |z_n|^2`` is about ``4 exp(-a_n)`` and ``a_n <= n * step``.
        """
        return DEFAULT_DPS + int(math.ceil(horizon * max(step, 0.0) / math.log(10.0)))

    def validate(self, z):
        with mp.workdps(max(self.dps, mp.dps)):
            try:
                w = to_mpc(z)
            except (TypeError, ValueError) as exc:
                raise DomainError(f"not a complex number: {z!r}") from exc
            if not (mp.isfinite(w.real) and mp.isfinite(w.imag)):
                raise DomainError("point has non-finite coordinates")
            if w.real ** 2 + w.imag ** 2 >= 1:
                raise DomainError(f"|z| >= 1 for z = {mp.nstr(w, 8)}")
            return w

    def dist(self, z, w) -> float:
        with mp.workdps(max(self.dps, mp.dps)):
            return _dist(to_mpc(z), to_mpc(w))

    def equal(self, z, w, tol=POINT_TOL):
        with mp.workdps(max(self.dps, mp.dps)):
            return bool(abs(to_mpc(z) - to_mpc(w)) <= tol)

    def sample(self, rng, n, radius=0.95):
        r = radius * np.sqrt(rng.uniform(size=n))
        theta = rng.uniform(0, 2 * np.pi, size=n)
        return [mp.mpc(complex(z)) for z in r * np.exp(1j * theta)]

    def base_dists(self, stack, log_scales):
        """``d(0, M 0)`` for scaled automorphism matrices normalized to ``det = 1``.

        The singular values of ``[[a, b], [conj b, conj a]]`` are ``|a| +- |b|``,
        so ``d(0, M 0) = log((|a| + |b|) / (|a| - |b|)) = 2 log sigma_max``.
        """
        return np.maximum(2.0 * (log_scales + np.log(sigma_max(stack))), 0.0)

    def encode(self, z):
        z = to_mpc(z)
        return [mp.nstr(z.real, self.dps), mp.nstr(z.imag, self.dps)]

    def decode(self, obj):
        if isinstance(obj, (list, tuple)):
            with mp.workdps(max(self.dps, mp.dps)):
                return self.validate(mp.mpc(mp.mpf(obj[0]), mp.mpf(obj[1])))
        return self.validate(obj)


_DEFAULT_DISK = PoincareDisk()


def disk_distance(z, w, space: PoincareDisk | None = None) -> float:
    """Poincaré distance ``2 artanh |(z - w) / (1 - conj(z) w)|``."""
    space = space or _DEFAULT_DISK
    return space.dist(space.validate(z), space.validate(w))


def disk_busemann(zeta, space: PoincareDisk | None = None) -> MetricFunctional:
    """Busemann function ``log(|zeta - z|^2 / (1 - |z|^2))`` of the ray 0 -> zeta."""
    space = space or _DEFAULT_DISK
    zeta_c = complex(zeta)
    if abs(abs(zeta_c) - 1.0) > POINT_TOL:
        raise ParameterError(f"|zeta| must be 1, got {abs(zeta_c)!r}")

    def h(z):
        with mp.workdps(max(space.dps, mp.dps)):
            z = to_mpc(z)
            zt = mp.mpc(zeta_c) / abs(mp.mpc(zeta_c))
            num = abs(zt - z) ** 2
            return float(mp.log(num) - mp.log(1 - (z.real ** 2 + z.imag ** 2)))

    return MetricFunctional("DiskBusemann", {"zeta": zeta_c}, h, kind="at-infinity")


def disk_geodesic_ray(zeta):
    """Unit-speed ray ``t -> tanh(t / 2) * zeta`` (evaluate inside a disk context)."""
    zeta_c = complex(zeta)

    def sample(t):
        return mp.tanh(mp.mpf(t) / 2) * mp.mpc(zeta_c)

    return sample


# Möbius matrices -------------------------------------------------------------

def mobius_apply(M, z):
    """Apply the fractional linear map of the 2x2 matrix ``M`` to ``z``."""
    a, b, c, d = (mp.mpc(complex(x)) for x in np.asarray(M, dtype=complex).ravel())
    return (a * z + b) / (c * z + d)


def mobius_normalize(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise ParameterError("Möbius matrix must be 2x2")
    det = np.linalg.det(M)
    if abs(det) == 0:
        raise ParameterError("Möbius matrix is singular")
    return M / np.sqrt(det)


def is_disk_automorphism(M, tol=1e-9) -> bool:
    """True if ``M`` is proportional to ``[[a, b], [conj(b), conj(a)]]``."""
    N = mobius_normalize(M)
    for s in (1, -1):
        K = s * N
        if abs(K[0, 0] - np.conj(K[1, 1])) <= tol and abs(K[0, 1] - np.conj(K[1, 0])) <= tol:
            return abs(K[0, 0]) > abs(K[0, 1])
    return False


def mobius_invariants(M) -> dict:
    """Type, translation length and boundary fixed points of a disk automorphism.

    For a hyperbolic map the attracting boundary point is the fixed point
    where the derivative has modulus below 1.
    """
    if not is_disk_automorphism(M):
        raise ParameterError("matrix does not preserve the unit disk")
    N = mobius_normalize(M)
    tr = abs(np.trace(N).real)
    a, b, c, d = N.ravel()
    out = {"trace": float(tr)}
    if tr < 2.0 - 1e-12:
        out["kind"] = "elliptic"
        out["tau"] = 0.0
        if abs(c) > 0:
            disc = np.sqrt((d - a) ** 2 + 4 * b * c)
            roots = [(a - d + disc) / (2 * c), (a - d - disc) / (2 * c)]
            inside = [z for z in roots if abs(z) < 1]
            out["fixed_point"] = complex(inside[0]) if inside else None
        else:
            out["fixed_point"] = complex(b / (d - a)) if abs(d - a) > 0 else 0j
        out["min_displacement"] = 0.0
        return out
    if abs(c) == 0:
        raise ParameterError("degenerate automorphism")
    disc = np.sqrt((d - a) ** 2 + 4 * b * c)
    roots = [(a - d + disc) / (2 * c), (a - d - disc) / (2 * c)]
    if tr <= 2.0 + 1e-12:
        out["kind"] = "parabolic"
        out["tau"] = 0.0
        out["boundary_point"] = complex(roots[0] / abs(roots[0]))
        out["min_displacement"] = 0.0
        return out
    tau = 2.0 * math.acosh(tr / 2.0)
    derivs = [abs(1.0 / (c * z + d) ** 2) for z in roots]
    attracting = roots[int(np.argmin(derivs))]
    repelling = roots[int(np.argmax(derivs))]
    out.update(kind="hyperbolic", tau=tau, min_displacement=tau,
               boundary_point=complex(attracting / abs(attracting)),
               repelling_point=complex(repelling / abs(repelling)))
    return out
