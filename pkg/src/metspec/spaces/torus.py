"""Teichmüller space of the flat torus with the Thurston distance.

A unit-area flat torus with modulus ``tau`` (``Im tau > 0``) gives the
simple closed curve ``(p, q)`` the length ``|p + q tau| / sqrt(Im tau)``.

Internally a point is a *marking matrix* ``g`` (a :class:`ScaledMatrix`
with ``|det g| = 1``) such that ``l(alpha) = |g^-1 alpha|``. The base
point ``tau = i`` is the identity. A mapping class ``M`` acts by
``g -> M g``, so that ``l_{M.x}(alpha) = l_x(M^-1 alpha)``. Keeping the
log-scale separate lets orbits run far beyond the range of ``tau`` itself.
Orbits of the base point under mapping classes are integer matrices;
they are kept exact (Python integers in an object array) so that
distances between far-out neighbouring orbit points do not cancel.
Points serialize as ``{"re": .., "im": ..}`` when the modulus is
representable, otherwise as ``{"log_scale": s, "matrix": [[..]]}``.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh

from ..core import POINT_TOL, Space
from ..exceptions import DomainError, ParameterError
from ..linalg import ScaledMatrix, adjugate2, sigma_max

DEFAULT_ENUMERATION_BOUND = 50


def _check_modulus(tau) -> complex:
    tau = complex(tau)
    if not (math.isfinite(tau.real) and math.isfinite(tau.imag)) or tau.imag <= 0:
        raise DomainError(f"modulus must lie in the upper half-plane, got {tau!r}")
    return tau


def is_exact(x) -> bool:
    return isinstance(x, ScaledMatrix) and x.mat.dtype == object


def exact_matrix(M) -> ScaledMatrix:
    """Exact integer marking matrix (entries must be integers)."""
    M = np.asarray(M)
    if M.shape != (2, 2) or not all(float(v) == int(v) for v in M.ravel()):
        raise ParameterError("exact markings need a 2x2 integer matrix")
    return ScaledMatrix(0.0, np.array([[int(v) for v in row] for row in M], dtype=object))


def to_float(x: ScaledMatrix) -> ScaledMatrix:
    """Float copy of an exact marking, rescaled so the entries stay representable."""
    if not is_exact(x):
        return x
    bits = max(abs(int(v)).bit_length() for v in x.mat.ravel())
    shift = max(bits - 60, 0)
    mat = np.array([[float(int(v) >> shift) if v >= 0 else -float((-int(v)) >> shift) for v in row]
                    for row in x.mat])
    return ScaledMatrix(x.log_scale + shift * math.log(2.0), mat)


def _int_adj_mul(y, x):
    a, b, c, d = y.mat.ravel()
    adj = np.array([[d, -b], [-c, a]], dtype=object)
    return ScaledMatrix(0.0, adj.dot(x.mat))


def torus_point(tau) -> ScaledMatrix:
    """Marking matrix of the modulus ``tau``."""
    tau = _check_modulus(tau)
    x, y = tau.real, tau.imag
    sy = math.sqrt(y)
    return ScaledMatrix(0.0, np.array([[sy, -x / sy], [0.0, 1.0 / sy]]))


def gram_form(tau) -> np.ndarray:
    """Unit-determinant quadratic form ``Q`` with ``l(alpha)^2 = alpha^t Q alpha``."""
    if isinstance(tau, ScaledMatrix):
        tau = to_float(tau)
        inv = adjugate2(tau.mat[None])[0]
        return math.exp(2 * tau.log_scale) * inv.T @ inv
    tau = _check_modulus(tau)
    y = tau.imag
    return np.array([[1.0, tau.real], [tau.real, abs(tau) ** 2]]) / y


def modulus(point: ScaledMatrix) -> complex:
    Q = gram_form(point)
    return complex(Q[0, 1] / Q[0, 0], 1.0 / Q[0, 0])


def _primitive(alpha) -> tuple[int, int]:
    if len(alpha) != 2:
        raise ParameterError("a curve is an integer pair (p, q)")
    p, q = alpha
    if int(p) != p or int(q) != q:
        raise ParameterError(f"curve {alpha!r} is not an integer pair")
    p, q = int(p), int(q)
    if (p, q) == (0, 0) or math.gcd(abs(p), abs(q)) != 1:
        raise ParameterError(f"curve {alpha!r} is not primitive")
    return p, q


def torus_length(tau, alpha) -> float:
    """Length ``|p + q tau| / sqrt(Im tau)`` of the curve ``alpha = (p, q)``."""
    p, q = _primitive(alpha)
    if isinstance(tau, ScaledMatrix):
        return math.exp(log_length(tau, (p, q)))
    tau = _check_modulus(tau)
    return abs(p + q * tau) / math.sqrt(tau.imag)


def log_length(point: ScaledMatrix, alpha) -> float:
    p, q = _primitive(alpha)
    point = to_float(point)
    inv = adjugate2(point.mat[None])[0]
    return point.log_scale + math.log(float(np.linalg.norm(inv @ np.array([p, q], float))))


def log_lengths(log_scales: np.ndarray, stack: np.ndarray, alpha) -> np.ndarray:
    """Vectorized :func:`log_length` over a stack of marking matrices."""
    p, q = _primitive(alpha)
    v = adjugate2(stack) @ np.array([p, q], float)
    return log_scales + np.log(np.linalg.norm(v, axis=-1))


@lru_cache(maxsize=16)
def primitive_pairs(N: int) -> np.ndarray:
    """Primitive pairs with ``|p|, |q| <= N``, one per sign class, sorted.

    The representative of ``+-(p, q)`` is the one with ``q > 0``, or
    ``(1, 0)``; ties in maximizations go to the lexicographically smallest.
    """
    out = set()
    for p in range(-N, N + 1):
        for q in range(-N, N + 1):
            if (p, q) != (0, 0) and math.gcd(abs(p), abs(q)) == 1:
                out.add(max((p, q), (-p, -q)))
    return np.array(sorted(out), dtype=float)


def thurston_enumerate(x, y, N: int = DEFAULT_ENUMERATION_BOUND):
    """``max log l_y(alpha) / l_x(alpha)`` over primitive ``|p|, |q| <= N``.

    Returns ``(value, alpha)``; ties go to the lexicographically smallest pair.
    """
    if N < 1:
        raise ParameterError("enumeration bound must be >= 1")
    pairs = primitive_pairs(int(N))
    Qx, Qy = gram_form(x), gram_form(y)
    lx = np.einsum("ni,ij,nj->n", pairs, Qx, pairs)
    ly = np.einsum("ni,ij,nj->n", pairs, Qy, pairs)
    logs = 0.5 * (np.log(ly) - np.log(lx))
    best = float(np.max(logs))
    # first index within rounding of the max is the lexicographic minimum
    idx = int(np.flatnonzero(logs >= best - 1e-15)[0])
    p, q = pairs[idx]
    return best, (int(p), int(q))


def thurston_closed_form(x, y) -> float:
    """``(1/2) log`` of the top generalized eigenvalue of ``(Q_y, Q_x)``."""
    Qx, Qy = gram_form(x), gram_form(y)
    lam = eigh(Qy, Qx, eigvals_only=True)
    return 0.5 * float(np.log(lam[-1]))


def thurston_dist(x, y, mode: str = "closed_form", N: int = DEFAULT_ENUMERATION_BOUND) -> float:
    """Thurston distance ``log sup_alpha l_y(alpha) / l_x(alpha)``.

    ``mode="enumerate"`` maximizes over primitive curves with
    ``|p|, |q| <= N``; ``mode="closed_form"`` solves the generalized
    eigenproblem of the two length forms.
    """
    if mode == "enumerate":
        return thurston_enumerate(x, y, N)[0]
    if mode == "closed_form":
        return thurston_closed_form(x, y)
    raise ParameterError(f"unknown mode {mode!r}")


def mapclass_act(M, alpha) -> tuple[int, int]:
    """Image ``M alpha`` of a primitive curve under an integer matrix with ``|det| = 1``."""
    M = np.asarray(M)
    if M.shape != (2, 2) or not np.all(M == np.round(M)):
        raise ParameterError("mapping class must be a 2x2 integer matrix")
    M = M.astype(np.int64)
    det = int(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if abs(det) != 1:
        raise ParameterError(f"|det M| must be 1, got {det}")
    p, q = _primitive(alpha)
    return int(M[0, 0] * p + M[0, 1] * q), int(M[1, 0] * p + M[1, 1] * q)


class TorusTeich(Space):
    """Flat-torus Teichmüller space with the Thurston distance, based at ``tau = i``.

    On this model the distance is symmetric and equals half the
    hyperbolic distance of the moduli.
    """

    name = "torus"
    symmetric = True

    @property
    def base_point(self):
        return exact_matrix(np.eye(2, dtype=int))

    def validate(self, x):
        if is_exact(x):
            a, b, c, d = x.mat.ravel()
            if x.mat.shape != (2, 2) or abs(a * d - b * c) != 1:
                raise DomainError("exact marking must be an integer matrix with |det| = 1")
            return x
        if isinstance(x, ScaledMatrix):
            if x.mat.shape != (2, 2) or not np.all(np.isfinite(x.mat)):
                raise DomainError("marking must be a finite 2x2 matrix")
            if abs(x.log_scale) < 10:
                det = abs(np.linalg.det(x.mat)) * math.exp(2 * x.log_scale)
                if abs(det - 1.0) > 1e-6:
                    raise DomainError(f"marking must have |det| = 1, got {det:.6g}")
            return x
        if isinstance(x, dict):
            return self.decode(x)
        return torus_point(x)

    def dist(self, x, y):
        if is_exact(x) and is_exact(y):
            m = to_float(_int_adj_mul(y, x))
            return m.log_scale + float(np.log(sigma_max(m.mat[None])[0]))
        x, y = to_float(ScaledMatrix.of(x)), to_float(ScaledMatrix.of(y))
        m = adjugate2(y.mat[None])[0] @ x.mat
        return x.log_scale + y.log_scale + float(np.log(sigma_max(m[None])[0]))

    def equal(self, x, y, tol=POINT_TOL):
        return max(self.dist(x, y), self.dist(y, x)) <= tol

    def sample(self, rng, n, window=(1.0, 0.5, 2.0)):
        re_max, im_lo, im_hi = window
        re = rng.uniform(-re_max, re_max, size=n)
        im = rng.uniform(im_lo, im_hi, size=n)
        return [torus_point(complex(a, b)) for a, b in zip(re, im)]

    def encode(self, x):
        if is_exact(x):
            return {"matrix": [[int(v) for v in row] for row in x.mat], "exact": True}
        x = ScaledMatrix.of(x)
        if abs(x.log_scale) < 300:
            tau = modulus(x)
            if tau.imag > 1e-300 and math.isfinite(tau.real):
                return {"re": tau.real, "im": tau.imag}
        return {"log_scale": x.log_scale, "matrix": x.mat.tolist()}

    def decode(self, obj):
        if isinstance(obj, dict) and obj.get("exact"):
            return self.validate(exact_matrix(np.array(obj["matrix"], dtype=object)))
        if isinstance(obj, dict) and "re" in obj:
            return torus_point(complex(obj["re"], obj["im"]))
        if isinstance(obj, dict):
            return self.validate(ScaledMatrix(float(obj["log_scale"]), np.asarray(obj["matrix"], float)))
        return torus_point(complex(*obj) if isinstance(obj, (list, tuple)) else obj)

    # matrix actions -----------------------------------------------------
    def act(self, P: ScaledMatrix, x):
        P = ScaledMatrix.of(P)
        if is_exact(x) and P.log_scale == 0.0 and np.all(P.mat == np.round(P.mat)):
            return ScaledMatrix(0.0, exact_matrix(P.mat).mat.dot(x.mat))
        return (P @ to_float(ScaledMatrix.of(x))).renormalized()

    def base_dists(self, stack, log_scales):
        return log_scales + np.log(sigma_max(stack))
