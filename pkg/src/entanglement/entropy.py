"""Reduced densities, von Neumann entropy and the binary entropy bound."""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import entr

from ..errors import InvalidInputError
from ..hilbert.basis import BipartiteBasis, EigenSystem, ManyBodyOperator, diagonalize
from ..projection.bath import BathState

logger = logging.getLogger(__name__)

TRACE_TOL = 1e-12
NEGATIVITY_TOL = 1e-12
PROBABILITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ReducedDensity:
    """Density matrix of one tensor factor of a universe eigenstate."""

    matrix: np.ndarray = field(repr=False)
    source_eig_index: int | None = None

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidInputError(f"density matrix must be square, got {matrix.shape}")
        trace = float(np.real(np.trace(matrix)))
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidInputError(f"density matrix trace is {trace:.15f}, expected 1")
        object.__setattr__(self, "matrix", (matrix + matrix.conj().T) / 2)

    @property
    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.matrix)


def _clip_probability(value: float, name: str = "Z") -> float:
    if not -PROBABILITY_TOL <= value <= 1 + PROBABILITY_TOL:
        raise InvalidInputError(f"{name} must lie in [0, 1], got {value}")
    return min(max(float(value), 0.0), 1.0)


def _eigenvector(H: ManyBodyOperator, eig_index: int, eigen: EigenSystem | None) -> np.ndarray:
    eigen = diagonalize(H) if eigen is None else eigen
    return eigen.vector(eig_index)


def reduce(
    H: ManyBodyOperator, eig_index: int, eigen: EigenSystem | None = None
) -> ReducedDensity:
    """Trace |λ⟩⟨λ| over the bath factor."""
    W = H.basis.as_matrix(_eigenvector(H, eig_index, eigen))
    return ReducedDensity(W.T @ W.conj(), eig_index)


def reduce_state(basis: BipartiteBasis, vector: np.ndarray) -> ReducedDensity:
    """SOI density of an arbitrary pure state, normalized first."""
    vector = np.asarray(vector, dtype=complex)
    W = basis.as_matrix(vector / np.linalg.norm(vector))
    return ReducedDensity(W.T @ W.conj())


def reduce_bath(
    H: ManyBodyOperator, eig_index: int, eigen: EigenSystem | None = None
) -> ReducedDensity:
    """Trace |λ⟩⟨λ| over the SOI factor; ⟨bath|ρ|bath⟩ is the separability."""
    W = H.basis.as_matrix(_eigenvector(H, eig_index, eigen))
    return ReducedDensity(W @ W.conj().T, eig_index)


def von_neumann(rho: ReducedDensity) -> float:
    """−Σ p ln p over the spectrum of ``rho`` (nats)."""
    p = rho.eigenvalues
    if p.min(initial=0.0) < -NEGATIVITY_TOL:
        raise InvalidInputError(f"density matrix has negative eigenvalue {p.min():.3e}")
    return float(np.sum(entr(np.clip(p, 0.0, None))))


def entropy_bound(Z: float) -> float:
    """Binary entropy B(Z) = −Z ln Z − (1−Z) ln(1−Z)."""
    Z = _clip_probability(Z)
    return float(entr(Z) + entr(1.0 - Z))


def two_state_density(Z: float) -> ReducedDensity:
    """diag(Z, 1 − Z), the two-weight density whose entropy is B(Z)."""
    Z = _clip_probability(Z)
    return ReducedDensity(np.diag([Z, 1.0 - Z]).astype(complex))


def leak_entropy(Z: float, leak: float) -> float:
    """Entropy of the weights (Z, leak, 1 − Z − leak); never below B(Z)."""
    Z = _clip_probability(Z)
    leak = _clip_probability(leak, "leak")
    if leak > 1.0 - Z + PROBABILITY_TOL:
        raise InvalidInputError(f"leak {leak} exceeds 1 - Z = {1.0 - Z}")
    rest = max(1.0 - Z - leak, 0.0)
    return float(entr(Z) + entr(leak) + entr(rest))


def schmidt_bound(
    H: ManyBodyOperator, eig_index: int, eigen: EigenSystem | None = None
) -> float:
    """Largest squared Schmidt coefficient: the supremum of Z over all bath states."""
    return float(reduce_bath(H, eig_index, eigen).eigenvalues[-1])


def optimal_bath_state(
    H: ManyBodyOperator, eig_index: int, eigen: EigenSystem | None = None
) -> BathState:
    """Bath state attaining ``schmidt_bound``."""
    _, vectors = scipy.linalg.eigh(reduce_bath(H, eig_index, eigen).matrix)
    return BathState.normalized(vectors[:, -1])
