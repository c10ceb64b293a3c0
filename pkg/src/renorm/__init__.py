"""Schur-complement renormalization, interaction curves and fixed points."""

from .curves import InteractionCurves, trace_curves
from .fixed_points import (
    FixedPointRecord,
    TransformPair,
    exact_separability,
    find_fixed_points,
    finite_difference_slope,
    linearized_shift,
    separability_direct,
    separability_from_eigensystem,
    similarity,
    slope_at,
    static_partners,
    transform_pairs,
    universe_vector,
    weight_factor,
)
from .kernel import CouplingKernel, KernelEstimate, kernel_build, kernel_quadratic_form
from .schur import pole_window, renormalized_hamiltonian, resolvent_solve, schur_M

__all__ = [
    "CouplingKernel",
    "FixedPointRecord",
    "InteractionCurves",
    "KernelEstimate",
    "TransformPair",
    "exact_separability",
    "find_fixed_points",
    "finite_difference_slope",
    "kernel_build",
    "kernel_quadratic_form",
    "linearized_shift",
    "pole_window",
    "renormalized_hamiltonian",
    "resolvent_solve",
    "schur_M",
    "separability_direct",
    "separability_from_eigensystem",
    "similarity",
    "slope_at",
    "static_partners",
    "trace_curves",
    "transform_pairs",
    "universe_vector",
    "weight_factor",
]
