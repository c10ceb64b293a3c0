"""Static, rest and coupling blocks of a Hamiltonian projected onto a bath state."""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.linalg

from ..errors import InvalidInputError
from ..hilbert.basis import (
    BipartiteBasis,
    EigenSystem,
    ManyBodyOperator,
    diagonalize,
    energy_scale,
)
from .bath import BathState

logger = logging.getLogger(__name__)


def complete_bath_basis(bath: BathState) -> np.ndarray:
    """Unitary whose first column is ``bath``.

    The remaining columns come from modified Gram–Schmidt over the canonical
    vectors, skipping the one most parallel to ``bath``.
    """
    b = bath.amplitudes
    n = b.shape[0]
    skip = int(np.argmax(np.abs(b)))
    columns = [np.array(b, copy=True)]
    for k in range(n):
        if k == skip:
            continue
        v = np.zeros(n, dtype=complex)
        v[k] = 1.0
        # two passes keep the columns orthonormal to machine precision
        for _ in range(2):
            for q in columns:
                v = v - (q.conj() @ v) * q
        v /= np.linalg.norm(v)
        columns.append(v)
    return np.column_stack(columns)


def bath_projector(bath: BathState, soi_dim: int) -> np.ndarray:
    """Full-space projector ``|bath⟩⟨bath| ⊗ I_SOI`` in the bath-major flat order."""
    b = bath.amplitudes
    return np.kron(np.outer(b, b.conj()), np.eye(soi_dim))


def projector_family(bath_basis: np.ndarray, soi_dim: int) -> list[np.ndarray]:
    """Projectors for every column of an orthonormal bath basis."""
    bath_basis = np.asarray(bath_basis, dtype=complex)
    deviation = np.abs(bath_basis.conj().T @ bath_basis - np.eye(bath_basis.shape[1])).max()
    if deviation > 1e-10:
        raise InvalidInputError(f"bath basis is not orthonormal (deviation {deviation:.3e})")
    return [
        bath_projector(BathState.normalized(bath_basis[:, j]), soi_dim)
        for j in range(bath_basis.shape[1])
    ]


@dataclass(frozen=True, eq=False)
class ProjectionBlocks:
    """``H_S``, ``H_R`` and the unscaled coupling ``C`` in the rotated product frame.

    ``frame`` maps rotated coordinates to the original basis; its first
    ``soi_dim`` columns span SOI ⊗ |bath⟩.
    """

    bath_state: BathState
    H_S: np.ndarray = field(repr=False)
    H_R: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    epsilon: float = 1.0
    basis: BipartiteBasis | None = None
    frame: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        _check_epsilon(self.epsilon)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        for name in ("H_S", "H_R", "C"):
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=complex)))
        d = self.H_S.shape[0]
        if self.C.shape != (d, self.H_R.shape[0]):
            raise InvalidInputError(
                f"coupling block shape {self.C.shape} inconsistent with blocks "
                f"{self.H_S.shape} and {self.H_R.shape}"
            )
        if self.basis is None:
            if self.dimension % d:
                basis = BipartiteBasis(1, self.dimension)
            else:
                basis = BipartiteBasis(d, self.dimension // d)
            object.__setattr__(self, "basis", basis)

    @property
    def soi_dim(self) -> int:
        return self.H_S.shape[0]

    @property
    def rest_dim(self) -> int:
        return self.H_R.shape[0]

    @property
    def dimension(self) -> int:
        return self.soi_dim + self.rest_dim

    @cached_property
    def static(self) -> EigenSystem:
        """Eigenpairs (ω_S, |S⟩) of the static block."""
        return diagonalize(self.H_S)

    @cached_property
    def poles(self) -> np.ndarray:
        if self.rest_dim == 0:
            return np.empty(0)
        return scipy.linalg.eigvalsh(self.H_R)

    @cached_property
    def universe(self) -> EigenSystem:
        """Exact eigenpairs of the reassembled operator at this ``epsilon``.

        The operator is diagonalized in the original product basis and the
        eigenvectors rotated into this frame, so degenerate eigenspaces get
        the same basis ``diagonalize`` picks for the unprojected Hamiltonian.
        """
        rotated = reassemble(self, self.epsilon)
        if self.frame is None:
            return diagonalize(rotated)
        original = _hermitize(self.frame @ rotated.matrix @ self.frame.conj().T)
        eigen = diagonalize(ManyBodyOperator(self.basis, original))
        return EigenSystem(eigen.values, self.frame.conj().T @ eigen.vectors, eigen.degenerate)

    @cached_property
    def spectral_range(self) -> float:
        return energy_scale(self.universe.values)

    def to_original(self, vector: np.ndarray) -> np.ndarray:
        """Map a rotated-frame state back to the original product basis."""
        if self.frame is None:
            return np.asarray(vector)
        return self.frame @ vector


def _check_epsilon(epsilon: float) -> None:
    if not (isinstance(epsilon, (int, float, np.floating)) and 0.0 <= epsilon <= 1.0):
        raise InvalidInputError(f"epsilon must lie in [0, 1], got {epsilon!r}")


def _hermitize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


def project(H: ManyBodyOperator, bath: BathState, epsilon: float = 1.0) -> ProjectionBlocks:
    """Split ``H`` into static, rest and coupling blocks for ``bath``.

    Args:
        H: Universe Hamiltonian on a bipartite basis
        bath: Normalized bath state of length ``bath_dim``
        epsilon: Coupling scale stored on the blocks

    Returns:
        ProjectionBlocks whose ``C`` is the upper-right (SOI × rest) block of the
        rotated Hamiltonian.
    """
    basis = H.basis
    if bath.dimension != basis.bath_dim:
        raise InvalidInputError(
            f"bath state has dimension {bath.dimension}, basis bath dimension is {basis.bath_dim}"
        )
    d = basis.soi_dim
    frame = np.kron(complete_bath_basis(bath), np.eye(d))
    rotated = frame.conj().T @ H.matrix @ frame

    blocks = ProjectionBlocks(
        bath_state=bath,
        H_S=_hermitize(rotated[:d, :d]),
        H_R=_hermitize(rotated[d:, d:]),
        C=np.array(rotated[:d, d:]),
        epsilon=epsilon,
        basis=basis,
        frame=frame,
    )
    logger.debug(
        "Projected %dx%d Hamiltonian onto bath state (rest dimension %d)",
        basis.dimension,
        basis.dimension,
        blocks.rest_dim,
    )
    return blocks


def rotated_hamiltonian(blocks: ProjectionBlocks) -> np.ndarray:
    """Universe Hamiltonian in the rotated frame at ε = 1."""
    return np.block([[blocks.H_S, blocks.C], [blocks.C.conj().T, blocks.H_R]])


def reassemble(blocks: ProjectionBlocks, epsilon: float) -> ManyBodyOperator:
    """Return ``[[H_S, √ε C], [√ε C†, H_R]]`` in the rotated frame."""
    _check_epsilon(epsilon)
    coupling = math.sqrt(epsilon) * blocks.C
    matrix = np.block([[blocks.H_S, coupling], [coupling.conj().T, blocks.H_R]])
    return ManyBodyOperator(blocks.basis, matrix)


def with_epsilon(blocks: ProjectionBlocks, epsilon: float) -> ProjectionBlocks:
    """Copy of ``blocks`` at another coupling scale; cached spectra are recomputed."""
    return replace(blocks, epsilon=epsilon)
