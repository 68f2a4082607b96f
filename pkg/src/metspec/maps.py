"""Factories for semicontractions with closed-form invariants.

Every factory fills ``oracle`` with what is known exactly about the map
(drift ``tau``, ``min_displacement``, fixed or boundary points) and a
``provenance`` string naming how it was obtained.
"""
from __future__ import annotations

import cmath
import math
from typing import Sequence

import mpmath as mp
import numpy as np

from .exceptions import ParameterError
from .linalg import ScaledMatrix
from .spaces.cone import PositiveCone
from .spaces.disk import PoincareDisk, is_disk_automorphism, mobius_invariants, mobius_normalize
from .spaces.euclidean import EuclideanSpace, affine_matrix
from .spaces.operator import OperatorSpace, _invertible
from .spaces.torus import TorusTeich
from .spectral import Semicontraction


# Euclidean --------------------------------------------------------------------------

def _affine_map(space: EuclideanSpace, U, v, label, oracle, isometry):
    U = np.asarray(U, dtype=float)
    v = np.asarray(v, dtype=float)

    def apply(x):
        return U @ np.asarray(x, dtype=float) + v

    inverse = None
    if isometry:
        Ui = U.T

        def inverse(x):
            return Ui @ (np.asarray(x, dtype=float) - v)

    return Semicontraction(space, apply, label, oracle, inverse, isometry, affine_matrix(U, v))


def translation(space: EuclideanSpace, c) -> Semicontraction:
    c = np.asarray(c, dtype=float)
    if c.shape != (space.dim,):
        raise ParameterError(f"translation vector must have length {space.dim}")
    tau = float(np.linalg.norm(c, space.p))
    oracle = {"tau": tau, "min_displacement": tau, "provenance": "a_n = n |c|"}
    return _affine_map(space, np.eye(space.dim), c, f"translation{tuple(c.tolist())}", oracle, True)


def rotation(space: EuclideanSpace, angle: float, plane=(0, 1)) -> Semicontraction:
    """Rotation by ``angle`` in the coordinate ``plane`` (an isometry for ``p = 2``)."""
    if space.dim < 2:
        raise ParameterError("rotation needs dim >= 2")
    i, j = plane
    U = np.eye(space.dim)
    c, s = math.cos(angle), math.sin(angle)
    U[i, i], U[i, j], U[j, i], U[j, j] = c, -s, s, c
    iso = space.p == 2.0
    oracle = {"tau": 0.0, "min_displacement": 0.0, "fixed_point": np.zeros(space.dim),
              "provenance": "fixed point at the origin"}
    return _affine_map(space, U, np.zeros(space.dim), f"rotation({angle:g})", oracle, iso)


def affine(space: EuclideanSpace, U, v) -> Semicontraction:
    """``w -> U w + v`` with ``U`` orthogonal; the drift is ``|P v|``."""
    from .spectral import invariant_projection

    U = np.asarray(U, dtype=float)
    v = np.asarray(v, dtype=float)
    if U.shape != (space.dim, space.dim) or v.shape != (space.dim,):
        raise ParameterError("shape mismatch between U, v and the space")
    if space.p != 2.0 or np.max(np.abs(U.T @ U - np.eye(space.dim))) > 1e-12:
        raise ParameterError("affine maps are built for orthogonal U on p = 2 spaces")
    tau = float(np.linalg.norm(invariant_projection(U) @ v))
    oracle = {"tau": tau, "provenance": "norm of the invariant projection of v"}
    return _affine_map(space, U, v, "affine", oracle, True)


def scaling(space: EuclideanSpace, factor: float, center=None) -> Semicontraction:
    """``x -> center + factor (x - center)`` with ``0 <= factor <= 1``."""
    if not 0 <= factor <= 1:
        raise ParameterError("factor must lie in [0, 1]")
    center = np.zeros(space.dim) if center is None else np.asarray(center, dtype=float)
    oracle = {"tau": 0.0, "min_displacement": 0.0, "fixed_point": center,
              "provenance": "contraction toward its center"}
    U = factor * np.eye(space.dim)
    return _affine_map(space, U, (1 - factor) * center, f"scaling({factor:g})", oracle, factor == 1)


# Poincaré disk ------------------------------------------------------------------------

def _mp_coeffs(M):
    return [mp.mpc(complex(x)) for x in np.asarray(M, dtype=complex).ravel()]


def mobius(space: PoincareDisk, M, label: str = "mobius") -> Semicontraction:
    """Disk automorphism ``z -> (a z + b) / (c z + d)``."""
    if not is_disk_automorphism(M):
        raise ParameterError("matrix does not preserve the unit disk")
    N = mobius_normalize(M)
    if abs(N[0, 0] - np.conj(N[1, 1])) > abs(N[0, 0] + np.conj(N[1, 1])):
        N = -N
    # exact [[a, b], [conj b, conj a]] structure keeps the map a disk automorphism
    # at every working precision
    N = np.array([[N[0, 0], N[0, 1]], [np.conj(N[0, 1]), np.conj(N[0, 0])]])
    a, b, c, d = _mp_coeffs(N)
    oracle = dict(mobius_invariants(N), provenance="trace of the normalized matrix")

    def apply(z):
        return (a * z + b) / (c * z + d)

    def inverse(z):
        return (d * z - b) / (-c * z + a)

    return Semicontraction(space, apply, label, oracle, inverse, True, N)


def disk_rotation(space: PoincareDisk, angle: float) -> Semicontraction:
    h = cmath.exp(0.5j * angle)
    return mobius(space, [[h, 0], [0, h.conjugate()]], f"disk-rotation({angle:g})")


def hyperbolic_mobius(space: PoincareDisk, t: float = 0.5, angle: float = 0.0) -> Semicontraction:
    """``[[1, t], [t, 1]]`` conjugated by the rotation ``z -> e^{i angle} z``.

    Attracting boundary point ``e^{i angle}``, drift ``log((1 + t) / (1 - t))``.
    """
    if not 0 < t < 1:
        raise ParameterError("t must lie in (0, 1)")
    w = cmath.exp(1j * angle)
    M = np.array([[1, t * w], [t * w.conjugate(), 1]], dtype=complex)
    return mobius(space, M, f"hyperbolic({t:g},{angle:g})")


def parabolic_mobius(space: PoincareDisk) -> Semicontraction:
    """Parabolic automorphism fixing the boundary point 1."""
    M = np.array([[1 + 0.5j, -0.5j], [0.5j, 1 - 0.5j]])
    return mobius(space, M, "parabolic")


def disk_power(space: PoincareDisk, k: int = 2) -> Semicontraction:
    if k < 1:
        raise ParameterError("power must be >= 1")
    oracle = {"tau": 0.0, "min_displacement": 0.0, "fixed_point": 0j, "provenance": "z^k fixes 0"}
    return Semicontraction(space, lambda z: z ** k, f"z^{k}", oracle)


def blaschke(space: PoincareDisk, zeros: Sequence[complex], boundary_point: complex = 1.0,
             label: str = "blaschke") -> Semicontraction:
    """Finite Blaschke product with the given zeros, rotated so that ``B(zeta) = zeta``.

    When the angular derivative ``sum (1 - |a|^2) / |zeta - a|^2`` at
    ``zeta`` is below 1 the map has no interior fixed point and every orbit
    converges to ``zeta``; this is recorded in the oracle.
    """
    zeros = [complex(a) for a in zeros]
    if not zeros or any(abs(a) >= 1 for a in zeros):
        raise ParameterError("zeros must be a nonempty list inside the disk")
    zeta = complex(boundary_point)
    if abs(abs(zeta) - 1) > 1e-12:
        raise ParameterError("boundary point must be unimodular")
    raw = 1 + 0j
    for a in zeros:
        raw *= (zeta - a) / (1 - a.conjugate() * zeta)
    lam = zeta / raw
    mp_zeros = [mp.mpc(a) for a in zeros]
    theta = cmath.phase(lam)

    def apply(z):
        out = mp.expj(theta)  # unimodular at the working precision
        for a in mp_zeros:
            out = out * (z - a) / (1 - mp.conj(a) * z)
        return out

    deriv = sum((1 - abs(a) ** 2) / abs(zeta - a) ** 2 for a in zeros)
    oracle = {"angular_derivative": deriv, "provenance": "angular derivative at the boundary point"}
    if deriv < 1:
        oracle.update(boundary_point=zeta, tau=-math.log(deriv))
    return Semicontraction(space, apply, label, oracle)


def random_mobius(space: PoincareDisk, rng: np.random.Generator, radius: float = 0.6) -> Semicontraction:
    """``z -> e^{i t} (z - a) / (1 - conj(a) z)`` with ``|a| <= radius``."""
    a = radius * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
    h = cmath.exp(0.5j * 2 * math.pi * rng.uniform())
    M = np.array([[h, -h * a], [(-h * a).conjugate(), h.conjugate()]])
    return mobius(space, M, "random-mobius")


def wolff_denjoy_family(space: PoincareDisk | None = None) -> list[Semicontraction]:
    """Three hyperbolic automorphisms and two Blaschke products without interior fixed points."""
    space = space or PoincareDisk()
    w = cmath.exp(1j)
    return [
        hyperbolic_mobius(space, 0.5, 0.0),
        hyperbolic_mobius(space, 0.6, 2.0),
        hyperbolic_mobius(space, 0.4, -2.5),
        # ((z + 0.8) / (1 + 0.8 z))^2 fixes 1 with angular derivative 2/9
        blaschke(space, [-0.8, -0.8], 1.0, "blaschke2"),
        blaschke(space, [-0.7 * w, -0.6 * w * cmath.exp(0.4j), -0.6 * w * cmath.exp(-0.4j)], w, "blaschke3"),
    ]


# cones, operators, torus -------------------------------------------------------------

def cone_linear(space: PositiveCone, A) -> Semicontraction:
    """``x -> A x`` for a nonnegative matrix without zero rows (1-Lipschitz for Funk and Thompson)."""
    A = np.asarray(A, dtype=float)
    if A.shape != (space.dim, space.dim) or np.any(A < 0) or np.any(A.sum(axis=1) <= 0):
        raise ParameterError("cone map needs a nonnegative square matrix without zero rows")
    return Semicontraction(space, lambda x: A @ np.asarray(x, dtype=float), "cone-linear", {})


def left_multiplication(space: OperatorSpace, G) -> Semicontraction:
    """``A -> G A``, an isometry of the operator hemi-metric."""
    G = _invertible(G)
    if G.shape != (space.dim, space.dim):
        raise ParameterError("matrix size does not match the space")
    Gs = ScaledMatrix.of(G)
    Gi = ScaledMatrix.of(np.linalg.inv(G))
    rho = float(np.max(np.abs(np.linalg.eigvals(G))))
    oracle = {"tau": math.log(rho), "provenance": "log spectral radius"}
    return Semicontraction(space, lambda A: space.act(Gs, A), "left-mult", oracle,
                           lambda A: space.act(Gi, A), True, G)


def mapping_class(space: TorusTeich, M) -> Semicontraction:
    """Action ``g -> M g`` of an integer matrix with ``|det| = 1``."""
    M = np.asarray(M)
    if M.shape != (2, 2) or not np.all(M == np.round(M)):
        raise ParameterError("mapping class must be a 2x2 integer matrix")
    M = M.astype(float)
    if abs(abs(np.linalg.det(M)) - 1) > 1e-9:
        raise ParameterError("mapping class must have |det| = 1")
    Ms, Mi = ScaledMatrix.of(M), ScaledMatrix.of(np.round(np.linalg.inv(M)))
    rho = float(np.max(np.abs(np.linalg.eigvals(M))))
    oracle = {"tau": math.log(rho), "provenance": "log spectral radius"}
    return Semicontraction(space, lambda g: space.act(Ms, g), f"mapping-class{M.astype(int).tolist()}",
                           oracle, lambda g: space.act(Mi, g), True, M)
