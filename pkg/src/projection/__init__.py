"""Bath-state projection of universe Hamiltonians."""

from .bath import (
    BathState,
    BlochRotation,
    bloch_unitary,
    canonical_bath_state,
    partner_bath_state,
    rotate_bath_state,
    rotation_coefficients,
)
from .blocks import (
    ProjectionBlocks,
    bath_projector,
    complete_bath_basis,
    project,
    projector_family,
    reassemble,
    rotated_hamiltonian,
    with_epsilon,
)

__all__ = [
    "BathState",
    "BlochRotation",
    "ProjectionBlocks",
    "bath_projector",
    "bloch_unitary",
    "canonical_bath_state",
    "complete_bath_basis",
    "partner_bath_state",
    "project",
    "projector_family",
    "reassemble",
    "rotate_bath_state",
    "rotated_hamiltonian",
    "with_epsilon",
]
