"""Sampled property checks shared by the invariant suite and the tests."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ALGEBRAIC_TOL, POINT_TOL, MetricFunctional, Space


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float  # largest violation (<= tolerance when passed)
    n: int
    tol: float

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "worst": float(self.worst),
                "samples": int(self.n), "tolerance": float(self.tol)}


def _result(name, excess, n, tol):
    worst = float(np.max(excess)) if len(excess) else 0.0
    return CheckResult(name, worst <= tol, worst, n, tol)


def _points(space, rng, n, points):
    return list(points) if points is not None else space.sample(rng, n)


def check_triangle(space: Space, n: int = 1000, seed: int = 0, tol: float = ALGEBRAIC_TOL,
                   points: Sequence | None = None) -> CheckResult:
    """``d(x, y) <= d(x, z) + d(z, y)`` on ``n`` sampled triples."""
    rng = np.random.default_rng(seed)
    pts = _points(space, rng, max(n, 3), points)
    idx = rng.integers(0, len(pts), size=(n, 3))
    with space.context():
        ex = [space.dist(pts[i], pts[j]) - space.dist(pts[i], pts[k]) - space.dist(pts[k], pts[j])
              for i, j, k in idx]
    return _result(f"triangle[{space.name}]", ex, n, tol)


def check_separation(space: Space, n: int = 1000, seed: int = 0, tol: float = POINT_TOL) -> CheckResult:
    """``d(x, x) = 0`` and ``d(x, y) + d(y, x) > 0`` for distinct sampled points."""
    rng = np.random.default_rng(seed)
    pts = space.sample(rng, n + 1)
    with space.context():
        ex = []
        for x, y in zip(pts[:-1], pts[1:]):
            ex.append(abs(space.dist(x, x)))
            if not space.equal(x, y):
                # a positive excess flags distinct points at distance zero
                ex.append(tol * 2 if space.dist(x, y) + space.dist(y, x) <= 0 else 0.0)
    return _result(f"separation[{space.name}]", ex, n, tol)


def check_functional(h: MetricFunctional, space: Space, n: int = 1000, seed: int = 0,
                     tol: float = ALGEBRAIC_TOL, convex: bool = False) -> list[CheckResult]:
    """Normalization, two-sided bounds and directed 1-Lipschitz property of ``h``.

    With ``convex`` also midpoint convexity (vector spaces only).
    """
    rng = np.random.default_rng(seed)
    ys = space.sample(rng, n)
    zs = space.sample(rng, n)
    x0 = space.base_point
    label = f"{h.tag}[{space.name}]"
    with space.context():
        hy = np.array([h(y) for y in ys])
        hz = np.array([h(z) for z in zs])
        up = np.array([space.dist(y, x0) for y in ys])
        lo = np.array([space.dist(x0, y) for y in ys])
        dyz = np.array([space.dist(y, z) for y, z in zip(ys, zs)])
        out = [
            CheckResult(f"normalization:{label}", abs(h(x0)) <= POINT_TOL, abs(h(x0)), 1, POINT_TOL),
            _result(f"bounds:{label}", np.maximum(hy - up, -lo - hy), n, tol),
            _result(f"lipschitz:{label}", hy - hz - dyz, n, tol),
        ]
        if convex:
            mids = [(np.asarray(y) + np.asarray(z)) / 2 for y, z in zip(ys, zs)]
            hm = np.array([h(m) for m in mids])
            out.append(_result(f"convexity:{label}", hm - (hy + hz) / 2, n, max(tol, 1e-12)))
    return out


def check_semicontraction(f, n: int = 1000, seed: int = 0, tol: float = ALGEBRAIC_TOL) -> CheckResult:
    """``d(f x, f y) <= d(x, y)`` on sampled pairs (both orders for hemi-metrics)."""
    space = f.space
    rng = np.random.default_rng(seed)
    xs, ys = space.sample(rng, n), space.sample(rng, n)
    with space.context():
        ex = [space.dist(f(x), f(y)) - space.dist(x, y) for x, y in zip(xs, ys)]
    return _result(f"semicontraction[{f.label}]", ex, n, tol)
