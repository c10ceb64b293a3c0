"""Weak-coupling approximations and the resonant-level impurity model."""

from .greens import (
    EffectiveTwoLevel,
    effective_two_level,
    greens_frame,
    greens_frequency,
    greens_time,
    greens_time_numeric,
)
from .lorentzian import (
    LorentzianModel,
    lorentzian_integral,
    lorentzian_weight,
    rescaled_weights,
)
from .perturbation import (
    first_order_eigenvalue,
    lippmann_schwinger_state,
    scaling_errors,
    scaling_exponent,
    slope_rpa,
    static_matrix_element,
)
from .siam import (
    SIAMAnalytic,
    SIAMComparison,
    SIAMModel,
    WidthConvention,
    binned_density,
    compare_to_lorentzian,
    hybridization,
    siam_build,
    siam_for_width,
    siam_report,
    siam_spectral_weights,
    spectral_function,
)

__all__ = [
    "EffectiveTwoLevel",
    "LorentzianModel",
    "SIAMAnalytic",
    "SIAMComparison",
    "SIAMModel",
    "WidthConvention",
    "binned_density",
    "compare_to_lorentzian",
    "effective_two_level",
    "first_order_eigenvalue",
    "greens_frame",
    "greens_frequency",
    "greens_time",
    "greens_time_numeric",
    "hybridization",
    "lippmann_schwinger_state",
    "lorentzian_integral",
    "lorentzian_weight",
    "rescaled_weights",
    "scaling_errors",
    "scaling_exponent",
    "siam_build",
    "siam_for_width",
    "siam_report",
    "siam_spectral_weights",
    "slope_rpa",
    "spectral_function",
    "static_matrix_element",
]
