"""Hemi-metric spaces, metric functionals and elementary metric utilities.

A :class:`Space` bundles a base point with a possibly asymmetric distance
``dist(x, y)``. Generic code never symmetrizes silently; use
:func:`sym_dist` when the symmetric distance is wanted.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .exceptions import (
    DomainError,
    InvariantViolation,
    ParameterError,
    PreconditionError,
    UnsupportedSpaceError,
)

POINT_TOL = 1e-12
ALGEBRAIC_TOL = 1e-9


class Space:
    """Base class for hemi-metric spaces with a distinguished base point.

    Subclasses implement :meth:`dist`, :meth:`validate`, :meth:`equal`,
    :meth:`sample` and the JSON codec :meth:`encode` / :meth:`decode`.
    """

    name = "space"
    #: True when ``dist`` is symmetric by construction.
    symmetric = False

    @property
    def base_point(self):
        raise NotImplementedError

    def dist(self, x, y) -> float:
        raise NotImplementedError

    def validate(self, x):
        """Return ``x`` in canonical form or raise :class:`DomainError`."""
        return x

    def equal(self, x, y, tol: float = POINT_TOL) -> bool:
        return max(self.dist(x, y), self.dist(y, x)) <= tol

    def sample(self, rng: np.random.Generator, n: int) -> list:
        raise NotImplementedError

    def encode(self, x):
        raise NotImplementedError

    def decode(self, obj):
        raise NotImplementedError

    def context(self):
        """Context entered while iterating maps (e.g. working precision)."""
        return contextlib.nullcontext()

    def describe(self) -> dict:
        return {"type": self.name}

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "type")
        return f"{type(self).__name__}({args})"


@dataclass(frozen=True)
class MetricFunctional:
    """An evaluable normalized function ``h`` with ``h(base_point) = 0``.

    ``tag`` names the parametric family (``Internal``, ``HilbertParam``,
    ``DiskBusemann``, ``LinearDual`` or ``Empirical``) and ``params`` its
    parameters. ``kind`` records, for closed forms only, whether the
    functional is ``internal``, ``exotic`` (finite but not internal) or
    ``at-infinity``.
    """

    tag: str
    params: Mapping[str, Any]
    func: Callable[[Any], float] = field(repr=False, compare=False)
    kind: str | None = None
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)

    def __call__(self, y) -> float:
        return float(self.func(y))

    def evaluate_many(self, points: Iterable) -> np.ndarray:
        return np.array([self(y) for y in points], dtype=float)

    def to_dict(self, space: Space | None = None) -> dict:
        params = {}
        for key, value in self.params.items():
            if key == "anchor" and space is not None:
                params[key] = space.encode(value)
            else:
                params[key] = _jsonable(value)
        out = {"tag": self.tag, "parameters": params}
        if self.kind is not None:
            out["kind"] = self.kind
        return out


def _jsonable(value):
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, float):
        return "inf" if math.isinf(value) else value
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return _jsonable(value.item())
    return str(value)


@dataclass(frozen=True)
class Ray:
    """A map ``t -> point`` for ``t >= 0``; ``is_geodesic`` once verified."""

    sample: Callable[[float], Any]
    is_geodesic: bool = False


def make_ray(space: Space, sample: Callable[[float], Any],
             check_times: Sequence[float] | None = None,
             tol: float = ALGEBRAIC_TOL) -> Ray:
    """Build a :class:`Ray` and verify it is unit speed on ``check_times``.

    Both orientations are checked: ``d(g(s), g(t)) = d(g(t), g(s)) = t - s``.
    """
    if check_times is None:
        check_times = np.linspace(0.0, 10.0, 11)
    ts = sorted(float(t) for t in check_times)
    geodesic = True
    with space.context():
        pts = [sample(t) for t in ts]
        for i, s in enumerate(ts):
            for j in range(i + 1, len(ts)):
                t = ts[j]
                if (abs(space.dist(pts[i], pts[j]) - (t - s)) > tol
                        or abs(space.dist(pts[j], pts[i]) - (t - s)) > tol):
                    geodesic = False
                    break
            if not geodesic:
                break
    return Ray(sample=sample, is_geodesic=geodesic)


def sym_dist(space: Space, x, y) -> float:
    """Symmetrization ``max(d(x, y), d(y, x))``."""
    x = space.validate(x)
    y = space.validate(y)
    return max(space.dist(x, y), space.dist(y, x))


def internal_functional(space: Space, x) -> MetricFunctional:
    """The functional ``y -> d(y, x) - d(x0, x)`` anchored at ``x``."""
    x = space.validate(x)
    x0 = space.base_point
    offset = space.dist(x0, x)

    def h(y):
        return space.dist(y, x) - offset

    return MetricFunctional("Internal", {"anchor": x}, h, kind="internal")


def gromov_product(space: Space, x, y, tol: float = ALGEBRAIC_TOL) -> float:
    """Gromov product ``(x|y)`` based at the space's base point.

    Raises :class:`UnsupportedSpaceError` if the distance is asymmetric on
    the pairs involved.
    """
    x = space.validate(x)
    y = space.validate(y)
    x0 = space.base_point
    pairs = ((x, y), (x, x0), (y, x0))
    for a, b in pairs:
        if abs(space.dist(a, b) - space.dist(b, a)) > tol:
            raise UnsupportedSpaceError("Gromov product needs a symmetric distance")
    return 0.5 * (space.dist(x, x0) + space.dist(y, x0) - space.dist(x, y))


def lipschitz_extend(values, space: Space, mode: str = "sup",
                     tol: float = ALGEBRAIC_TOL) -> Callable[[Any], float]:
    """Extend a 1-Lipschitz function on a finite set to the whole space.

    ``values`` is a mapping or a sequence of ``(point, value)`` pairs. The
    sup-mode extension is ``b -> max_a f(a) - d(a, b)`` and the inf-mode
    one ``b -> min_a f(a) + d(b, a)``; both are directed 1-Lipschitz and
    ``sup <= inf`` pointwise.
    """
    if mode not in ("sup", "inf"):
        raise ParameterError(f"mode must be 'sup' or 'inf', got {mode!r}")
    items = list(values.items()) if isinstance(values, Mapping) else list(values)
    if not items:
        raise ParameterError("need at least one anchor")
    anchors = [space.validate(a) for a, _ in items]
    vals = [float(v) for _, v in items]
    for i, a in enumerate(anchors):
        for j, b in enumerate(anchors):
            if i != j and vals[i] - vals[j] > space.dist(a, b) + tol:
                raise PreconditionError("input values are not 1-Lipschitz on the anchor set")

    if mode == "sup":
        def ext(b):
            return max(v - space.dist(a, b) for a, v in zip(anchors, vals))
    else:
        def ext(b):
            return min(v + space.dist(b, a) for a, v in zip(anchors, vals))
    return ext


def busemann_along_ray(space: Space, ray: Ray, y, horizon: float,
                       steps: int = 16, tol: float = ALGEBRAIC_TOL) -> float:
    """Finite-horizon Busemann value ``d(g(T), y) - d(g(T), g(0))``.

    The value is computed on an increasing schedule of horizons ending at
    ``horizon``; the schedule must be non-increasing and bounded below by
    ``-d(y, g(0))``, otherwise :class:`InvariantViolation` is raised.
    """
    if not ray.is_geodesic:
        raise PreconditionError("ray is not a verified geodesic")
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    with space.context():
        y = space.validate(y)
        origin = ray.sample(0.0)
        floor = -space.dist(y, origin)
        prev = math.inf
        value = math.nan
        for t in np.linspace(horizon / steps, horizon, steps):
            gt = ray.sample(float(t))
            value = space.dist(gt, y) - space.dist(gt, origin)
            if value > prev + tol:
                raise InvariantViolation(f"Busemann sequence increased at T={t}")
            if value < floor - tol:
                raise InvariantViolation(f"Busemann value below -d(y, x0) at T={t}")
            prev = value
    return float(value)
