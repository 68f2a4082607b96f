"""Hemi-metric spaces, metric functionals, drift,
record-time extraction of descending functionals and random products."""
from .core import (
    MetricFunctional,
    Ray,
    Space,
    busemann_along_ray,
    gromov_product,
    internal_functional,
    lipschitz_extend,
    make_ray,
    sym_dist,
)
from .ergodic import (
    CocycleDriver,
    CocycleTrace,
    ShiftedEvaluator,
    compose_cocycle,
    curve_growth,
    dominant_curve,
    km_record_times,
    top_lyapunov,
)
from .exceptions import *  # noqa: F401,F403
from .spectral import (
    BoxWindow,
    DiskWindow,
    OrbitTrace,
    Semicontraction,
    classify,
    drift,
    extract_functional,
    isometry_inverse_bound,
    matrix_orbit,
    mean_ergodic,
    min_displacement,
    orbit,
    record_times,
    search_displacement,
    tracial_check,
    verify_descent,
)

__version__ = "0.1.0"
