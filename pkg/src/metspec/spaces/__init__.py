"""Concrete model spaces with exact distances and closed-form functionals."""
from .cone import PositiveCone, funk_dist, hilbert_projective_dist, thompson_dist
from .disk import (
    PoincareDisk,
    disk_busemann,
    disk_distance,
    disk_geodesic_ray,
    is_disk_automorphism,
    mobius_apply,
    mobius_invariants,
)
from .distortion import DistortionEstimate, distortion_coeff, distortion_estimate
from .euclidean import (
    HILBERT_DIM,
    EuclideanSpace,
    affine_matrix,
    hilbert_functional,
    hilbert_limit_classifier,
    linear_dual,
)
from .operator import OperatorSpace, operator_hemi_dist
from .torus import (
    TorusTeich,
    gram_form,
    log_length,
    log_lengths,
    mapclass_act,
    modulus,
    primitive_pairs,
    thurston_closed_form,
    thurston_dist,
    thurston_enumerate,
    torus_length,
    torus_point,
)

__all__ = [
    "DistortionEstimate", "EuclideanSpace", "HILBERT_DIM", "OperatorSpace", "PoincareDisk",
    "PositiveCone", "TorusTeich", "affine_matrix", "disk_busemann", "disk_distance",
    "disk_geodesic_ray", "distortion_coeff", "distortion_estimate", "funk_dist", "gram_form",
    "hilbert_functional", "hilbert_limit_classifier", "hilbert_projective_dist",
    "is_disk_automorphism", "linear_dual", "log_length", "log_lengths", "mapclass_act",
    "mobius_apply", "mobius_invariants", "modulus", "operator_hemi_dist", "primitive_pairs",
    "thompson_dist", "thurston_closed_form", "thurston_dist", "thurston_enumerate",
    "torus_length", "torus_point",
]
