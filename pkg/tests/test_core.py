import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from metspec import (
    Ray,
    busemann_along_ray,
    gromov_product,
    internal_functional,
    lipschitz_extend,
    make_ray,
    sym_dist,
)
from metspec.checks import check_functional, check_separation, check_triangle
from metspec.exceptions import (
    DomainError,
    InvariantViolation,
    ParameterError,
    PreconditionError,
    UnsupportedSpaceError,
)
from metspec.spaces import EuclideanSpace, PoincareDisk, PositiveCone, disk_busemann, disk_geodesic_ray

R1 = EuclideanSpace(1)
R2 = EuclideanSpace(2)
FUNK = PositiveCone(2)

finite = st.floats(-50, 50, allow_nan=False)


def test_sym_dist_examples():
    assert sym_dist(FUNK, [1, 1], [1, 1]) == 0.0
    assert FUNK.dist([2, 1], [1, 1]) == pytest.approx(math.log(2), abs=1e-15)
    assert FUNK.dist([1, 1], [2, 1]) == 0.0
    assert sym_dist(FUNK, [2, 1], [1, 1]) == pytest.approx(math.log(2), abs=1e-15)
    assert sym_dist(R2, [0, 0], [3, 4]) == 5.0


def test_sym_dist_rejects_invalid_points():
    with pytest.raises(DomainError):
        sym_dist(FUNK, [1, -1], [1, 1])


@given(st.lists(st.floats(0.01, 100), min_size=3, max_size=3), st.lists(st.floats(0.01, 100), min_size=3, max_size=3))
def test_sym_dist_symmetric_and_nonnegative(x, y):
    cone = PositiveCone(3)
    d = sym_dist(cone, x, y)
    assert d >= 0
    assert d == sym_dist(cone, y, x)


def test_internal_functional_examples():
    h = internal_functional(R1, [3.0])
    assert h([1.0]) == -1.0
    assert h(R1.base_point) == 0.0
    assert internal_functional(R2, [4, 0])([4, 0]) == -4.0
    h0 = internal_functional(R2, R2.base_point)
    for y in R2.sample(np.random.default_rng(0), 20):
        assert h0(y) == R2.dist(y, R2.base_point)


def test_gromov_product_examples():
    assert gromov_product(R1, [3.0], [5.0]) == 3.0
    assert gromov_product(R1, [3.0], [3.0]) == 3.0
    assert gromov_product(R2, [1, 0], [0, 1]) == pytest.approx((2 - math.sqrt(2)) / 2, abs=1e-15)


def test_gromov_product_needs_symmetry():
    with pytest.raises(UnsupportedSpaceError):
        gromov_product(FUNK, [2, 1], [1, 3])


def test_lipschitz_extend_examples():
    lo = lipschitz_extend({(0.0,): 0.0}, R1, "sup")
    hi = lipschitz_extend({(0.0,): 0.0}, R1, "inf")
    for b in (-3.0, 0.0, 2.5):
        assert lo([b]) == -abs(b)
        assert hi([b]) == abs(b)
    ext = lipschitz_extend([([0.0], 0.0), ([10.0], 4.0)], R1, "sup")
    assert ext([5.0]) == -1.0


def test_lipschitz_extend_rejects_non_lipschitz_data():
    with pytest.raises(PreconditionError):
        lipschitz_extend([([0.0], 0.0), ([1.0], 3.0)], R1)
    with pytest.raises(ParameterError):
        lipschitz_extend([([0.0], 0.0)], R1, mode="mid")


def test_lipschitz_extensions_bracket_and_agree_on_anchors():
    rng = np.random.default_rng(1)
    anchors = FUNK.sample(rng, 6)
    # data from a 1-Lipschitz function: an internal functional
    g = internal_functional(FUNK, FUNK.sample(rng, 1)[0])
    data = [(a, g(a)) for a in anchors]
    lo, hi = lipschitz_extend(data, FUNK, "sup"), lipschitz_extend(data, FUNK, "inf")
    for a, v in data:
        assert lo(a) == pytest.approx(v, abs=1e-12)
        assert hi(a) == pytest.approx(v, abs=1e-12)
    ys, zs = FUNK.sample(rng, 300), FUNK.sample(rng, 300)
    for y, z in zip(ys, zs):
        assert lo(y) <= g(y) + 1e-12 <= hi(y) + 2e-12
        for e in (lo, hi):
            assert e(y) - e(z) <= FUNK.dist(y, z) + 1e-9


def test_make_ray_detects_geodesics():
    assert make_ray(R2, lambda t: np.array([t, 0.0])).is_geodesic
    assert not make_ray(R2, lambda t: np.array([2 * t, 0.0])).is_geodesic


def test_busemann_along_ray_euclidean():
    ray = make_ray(R2, lambda t: np.array([t, 0.0]))
    assert busemann_along_ray(R2, ray, [2.5, 0.0], horizon=10) == -2.5
    assert busemann_along_ray(R2, ray, [0.0, 0.0], horizon=7) == 0.0
    with pytest.raises(PreconditionError):
        busemann_along_ray(R2, make_ray(R2, lambda t: np.array([2 * t, 0.0])), [1, 0], 5)


def test_busemann_along_ray_disk_matches_closed_form():
    disk = PoincareDisk(60)
    ray = make_ray(disk, disk_geodesic_ray(1.0), check_times=np.linspace(0, 20, 6))
    assert ray.is_geodesic
    value = busemann_along_ray(disk, ray, 0.5, horizon=40)
    assert value == pytest.approx(math.log(1 / 3), abs=1e-9)
    B = disk_busemann(1.0, disk)
    rng = np.random.default_rng(2)
    for y in disk.sample(rng, 10):
        assert busemann_along_ray(disk, ray, y, horizon=20) == pytest.approx(B(y), abs=1e-6)


def test_busemann_along_ray_flags_increasing_values():
    # a path declared geodesic that turns back after t = 5
    bent = Ray(lambda t: np.array([t if t < 5 else 10 - t, 0.0]), is_geodesic=True)
    with pytest.raises(InvariantViolation):
        busemann_along_ray(R2, bent, [3.0, 0.0], horizon=10, steps=10)


@pytest.mark.parametrize("space", [R2, EuclideanSpace(3, 1), EuclideanSpace(3, math.inf), FUNK,
                                   PositiveCone(3, "thompson"), PoincareDisk()], ids=repr)
def test_space_axioms(space):
    assert check_triangle(space, 1000, seed=3).passed
    assert check_separation(space, 200, seed=3).passed


@pytest.mark.parametrize("space", [R2, FUNK, PoincareDisk()], ids=repr)
def test_internal_functionals_satisfy_bounds(space):
    anchor = space.sample(np.random.default_rng(4), 1)[0]
    for res in check_functional(internal_functional(space, anchor), space, 1000, seed=4):
        assert res.passed, res


@given(st.lists(finite, min_size=2, max_size=2), st.lists(finite, min_size=2, max_size=2),
       st.lists(finite, min_size=2, max_size=2))
def test_internal_functional_directed_lipschitz(x, y, z):
    h = internal_functional(R2, x)
    assert h(y) - h(z) <= R2.dist(y, z) + 1e-9
    assert -R2.dist(R2.base_point, y) - 1e-9 <= h(y) <= R2.dist(y, R2.base_point) + 1e-9
