"""Bipartite bases, Hamiltonians and exact diagonalization."""

from .basis import (
    BipartiteBasis,
    EigenSystem,
    ManyBodyOperator,
    check_hermitian,
    diagonalize,
    energy_scale,
)
from .pauli import pauli, pauli_vector
from .two_site import TWO_SITE_BASIS, TwoSiteParams, build_two_site

__all__ = [
    "BipartiteBasis",
    "EigenSystem",
    "ManyBodyOperator",
    "TWO_SITE_BASIS",
    "TwoSiteParams",
    "build_two_site",
    "check_hermitian",
    "diagonalize",
    "energy_scale",
    "pauli",
    "pauli_vector",
]
