"""Finite-dimensional normed spaces and the Hilbert-space functional catalog."""
from __future__ import annotations

import math
from dataclasses import replace
from typing import Sequence

import numpy as np

from ..core import POINT_TOL, MetricFunctional, Space
from ..exceptions import ConvergenceError, DomainError, ParameterError
from ..linalg import ScaledMatrix

#: default ambient dimension for Hilbert-space scenarios
HILBERT_DIM = 8


class EuclideanSpace(Space):
    """``R^dim`` with the ``p``-norm distance, based at the origin.

    Points are 1-d float arrays; they serialize as JSON arrays. Affine
    maps act through ``(dim+1) x (dim+1)`` homogeneous matrices.
    """

    name = "euclidean"
    symmetric = True

    def __init__(self, dim: int = 2, p: float = 2.0):
        if int(dim) != dim or dim < 1:
            raise ParameterError(f"dim must be a positive integer, got {dim!r}")
        p = float(p)
        if not p >= 1.0:
            raise ParameterError(f"p must lie in [1, inf], got {p!r}")
        self.dim = int(dim)
        self.p = p
        self._origin = np.zeros(self.dim)

    @property
    def base_point(self):
        return self._origin

    def describe(self):
        return {"type": self.name, "dim": self.dim,
                "p": "inf" if math.isinf(self.p) else self.p}

    def validate(self, x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0 and self.dim == 1:
            arr = arr.reshape(1)
        if arr.shape != (self.dim,):
            raise DomainError(f"expected a vector of length {self.dim}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DomainError("point has non-finite coordinates")
        return arr

    def norm(self, x) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float), ord=self.p))

    def dist(self, x, y) -> float:
        return self.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def equal(self, x, y, tol=POINT_TOL):
        return bool(np.max(np.abs(np.asarray(x) - np.asarray(y))) <= tol)

    def sample(self, rng, n, scale=3.0):
        return list(rng.normal(size=(n, self.dim)) * scale)

    def encode(self, x):
        return [float(v) for v in np.asarray(x).ravel()]

    def decode(self, obj):
        return self.validate(obj)

    # matrix actions -----------------------------------------------------
    def act(self, P: ScaledMatrix, x):
        hom = P.mat @ np.append(np.asarray(x, dtype=float), 1.0)
        return hom[:-1] / hom[-1]

    def base_dists(self, stack: np.ndarray, log_scales: np.ndarray) -> np.ndarray:
        pts = stack[:, :-1, -1] / stack[:, -1:, -1]
        return np.linalg.norm(pts, ord=self.p, axis=1)


def affine_matrix(U, v) -> np.ndarray:
    U = np.atleast_2d(np.asarray(U, dtype=float))
    v = np.asarray(v, dtype=float).ravel()
    n = v.size
    out = np.eye(n + 1)
    out[:n, :n] = U
    out[:n, n] = v
    return out


def _unit_ball_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if np.linalg.norm(v) > 1.0 + POINT_TOL:
        raise ParameterError(f"need |v| <= 1, got |v| = {np.linalg.norm(v):.6g}")
    return v


def linear_dual(v) -> MetricFunctional:
    """The linear functional ``y -> -(y, v)`` for ``|v| <= 1``."""
    v = _unit_ball_vector(v)

    def h(y):
        return -float(np.dot(y, v))

    return MetricFunctional("LinearDual", {"v": v}, h, kind="at-infinity")


def hilbert_functional(r: float, v) -> MetricFunctional:
    """Closed-form metric functionals of a Hilbert space.

    ``r = inf`` gives the linear functional ``-(y, v)``, ``r = 0`` gives
    the norm, and finite positive ``r`` gives
    ``sqrt(|y|^2 - 2 r (y, v) + r^2) - r``.
    """
    v = _unit_ball_vector(v)
    r = float(r)
    if not r >= 0.0:
        raise ParameterError(f"r must be >= 0 or inf, got {r!r}")
    if math.isinf(r):
        return linear_dual(v)
    if r == 0.0:
        def h0(y):
            return float(np.linalg.norm(y))
        return MetricFunctional("HilbertParam", {"r": 0.0, "v": np.zeros_like(v)}, h0,
                                kind="internal")

    slack = r * r * max(0.0, 1.0 - float(np.dot(v, v)))
    rv = r * v

    def h(y):
        y = np.asarray(y, dtype=float)
        diff = y - rv
        root = math.sqrt(float(np.dot(diff, diff)) + slack)
        # (root - r) rewritten to avoid cancellation for large r
        return (float(np.dot(y, y)) - 2.0 * float(np.dot(y, rv))) / (root + r)

    unit = abs(float(np.linalg.norm(v)) - 1.0) <= POINT_TOL
    return MetricFunctional("HilbertParam", {"r": r, "v": v}, h,
                            kind="internal" if unit else "exotic")


def _internal_value(y, t, v):
    diff = y - t * v
    root = math.sqrt(float(np.dot(diff, diff)))
    return (float(np.dot(y, y)) - 2.0 * t * float(np.dot(y, v))) / (root + t)


def hilbert_limit_classifier(ts: Sequence[float], vs: Sequence, r: float | None = None,
                             v=None, probes=None, tol: float = 1e-3) -> MetricFunctional:
    """Limit functional of the internal functionals anchored at ``t_i v_i``.

    The limit is never inferred: the caller declares ``r`` (the limit of
    ``t_i``, possibly ``inf``) and ``v`` (the weak limit of ``v_i``). The
    declared limit is checked by evaluating the sequence on ``probes``; the
    terminal probe error must be at most ``tol``. Per-index probe errors
    are returned in ``meta["probe_errors"]``.
    """
    if r is None:
        raise ParameterError("limit radius not declared; refusing to infer a limit")
    ts = np.asarray(ts, dtype=float)
    vs = np.atleast_2d(np.asarray(vs, dtype=float))
    if ts.size == 0 or ts.size != len(vs):
        raise ParameterError("ts and vs must be non-empty and of equal length")
    if np.any(np.abs(np.linalg.norm(vs, axis=1) - 1.0) > 1e-9):
        raise ParameterError("every v_i must be a unit vector")
    dim = vs.shape[1]
    if float(r) == 0.0:
        limit = hilbert_functional(0.0, np.zeros(dim))
    else:
        if v is None:
            raise ParameterError("weak limit v not declared; refusing to infer a limit")
        limit = hilbert_functional(r, v)
    if probes is None:
        rng = np.random.default_rng(0)
        probes = np.zeros((10, dim))
        probes[:, :min(2, dim)] = rng.uniform(-1, 1, size=(10, min(2, dim)))
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    expected = np.array([limit(y) for y in probes])
    errors = np.array([
        max(abs(_internal_value(y, t, vi) - e) for y, e in zip(probes, expected))
        for t, vi in zip(ts, vs)
    ])
    if errors[-1] > tol:
        raise ConvergenceError(
            f"terminal probe error {errors[-1]:.3g} exceeds tol {tol:g} for the declared limit")
    return replace(limit, meta={"probe_errors": errors})
