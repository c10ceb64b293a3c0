"""Entanglement entropy of universe eigenstates and its separability bound."""

from .entropy import (
    ReducedDensity,
    entropy_bound,
    leak_entropy,
    optimal_bath_state,
    reduce,
    reduce_bath,
    reduce_state,
    schmidt_bound,
    two_state_density,
    von_neumann,
)

__all__ = [
    "ReducedDensity",
    "entropy_bound",
    "leak_entropy",
    "optimal_bath_state",
    "reduce",
    "reduce_bath",
    "reduce_state",
    "schmidt_bound",
    "two_state_density",
    "von_neumann",
]
