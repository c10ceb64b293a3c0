"""Bipartite tensor-product bases, Hermitian operators and exact diagonalization."""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from ..errors import ConvergenceError, InvalidInputError, NumericConsistencyError

logger = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12
RESIDUAL_RTOL = 1e-10
ORTHONORMAL_TOL = 1e-10
DEGENERACY_RTOL = 1e-8
EXACT_DEGENERACY_RTOL = 1e-11


def energy_scale(values: np.ndarray) -> float:
    """Spectral range of ``values``, falling back to a unit scale for flat spectra."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 1.0
    spread = float(values.max() - values.min())
    if spread > 0:
        return spread
    return max(float(np.abs(values).max()), 1.0)


def _freeze(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex, copy=True)
    array.setflags(write=False)
    return array


def check_hermitian(matrix: np.ndarray, rtol: float = HERMITIAN_RTOL) -> None:
    """Raise ``InvalidInputError`` unless ``matrix`` is square, finite and Hermitian."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInputError("matrix contains non-finite entries")
    largest = float(np.abs(matrix).max()) if matrix.size else 0.0
    deviation = float(np.abs(matrix - matrix.conj().T).max()) if matrix.size else 0.0
    if deviation > rtol * largest:
        raise InvalidInputError(
            f"matrix is not Hermitian (max |H - H^dag| = {deviation:.3e})"
        )


@dataclass(frozen=True)
class BipartiteBasis:
    """Product basis SOI ⊗ bath, flattened with the bath index varying slower.

    The flat index of ``(soi_index, bath_index)`` is ``bath_index * soi_dim + soi_index``.
    """

    soi_dim: int
    bath_dim: int

    def __post_init__(self):
        for name in ("soi_dim", "bath_dim"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise InvalidInputError(f"{name} must be a positive integer, got {value!r}")
        if self.soi_dim > self.bath_dim:
            logger.warning(
                "SOI dimension %d exceeds bath dimension %d; conventions assume D_SOI <= D_bath",
                self.soi_dim,
                self.bath_dim,
            )

    @property
    def dimension(self) -> int:
        return self.soi_dim * self.bath_dim

    @cached_property
    def labels(self) -> list[tuple[int, int]]:
        return [(s, b) for b in range(self.bath_dim) for s in range(self.soi_dim)]

    def index(self, soi_index: int, bath_index: int) -> int:
        if not (0 <= soi_index < self.soi_dim and 0 <= bath_index < self.bath_dim):
            raise InvalidInputError(f"label ({soi_index}, {bath_index}) outside basis")
        return bath_index * self.soi_dim + soi_index

    def as_matrix(self, vector: np.ndarray) -> np.ndarray:
        """Reshape a flat state into its ``(bath_dim, soi_dim)`` coefficient matrix."""
        vector = np.asarray(vector)
        if vector.shape[0] != self.dimension:
            raise InvalidInputError(
                f"state has length {vector.shape[0]}, basis dimension is {self.dimension}"
            )
        return vector.reshape(self.bath_dim, self.soi_dim, *vector.shape[1:])


@dataclass(frozen=True, eq=False)
class ManyBodyOperator:
    """Dense Hermitian operator on a bipartite basis."""

    basis: BipartiteBasis
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.basis.dimension
        if np.shape(self.matrix) != (n, n):
            raise InvalidInputError(
                f"matrix shape {np.shape(self.matrix)} does not match basis dimension {n}"
            )
        check_hermitian(self.matrix)
        object.__setattr__(self, "matrix", _freeze(self.matrix))

    @classmethod
    def from_matrix(
        cls, matrix: np.ndarray, soi_dim: int | None = None, bath_dim: int | None = None
    ) -> "ManyBodyOperator":
        """Wrap a raw matrix; without dimensions the SOI is taken one-dimensional."""
        n = np.shape(matrix)[0]
        if soi_dim is None and bath_dim is None:
            soi_dim, bath_dim = 1, n
        elif soi_dim is None:
            soi_dim = n // bath_dim
        elif bath_dim is None:
            bath_dim = n // soi_dim
        return cls(BipartiteBasis(int(soi_dim), int(bath_dim)), matrix)

    @property
    def dimension(self) -> int:
        return self.basis.dimension

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.matrix)

    @cached_property
    def spectral_range(self) -> float:
        return energy_scale(self.eigenvalues)

    def __neg__(self) -> "ManyBodyOperator":
        return ManyBodyOperator(self.basis, -self.matrix)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray = field(repr=False)
    degenerate: bool = False

    @property
    def spectral_range(self) -> float:
        return energy_scale(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def vector(self, index: int) -> np.ndarray:
        if not 0 <= index < len(self.values):
            raise InvalidInputError(
                f"eigenstate index {index} outside 0..{len(self.values) - 1}"
            )
        return self.vectors[:, index]


def _tie_breakers(basis: BipartiteBasis) -> list[np.ndarray]:
    """Operators used, in order, to fix a basis inside an exactly degenerate eigenspace."""
    n = basis.dimension
    operators = []
    if basis.soi_dim == basis.bath_dim:
        # exchange of the SOI and bath labels
        swap = np.zeros((n, n))
        for s, b in basis.labels:
            swap[basis.index(b, s), basis.index(s, b)] = 1.0
        operators.append(swap)
    operators.append(np.diag(np.arange(n, dtype=float)))
    return operators


def _resolve_degenerate(
    values: np.ndarray, vectors: np.ndarray, basis: BipartiteBasis, tol: float
) -> np.ndarray:
    """Rotate each cluster of equal eigenvalues onto eigenvectors of the tie-breakers."""
    vectors = np.array(vectors, copy=True)
    boundaries = np.flatnonzero(np.diff(values) >= tol) + 1
    for cluster in np.split(np.arange(values.size), boundaries):
        if cluster.size < 2:
            continue
        V = vectors[:, cluster]
        for op in _tie_breakers(basis):
            restricted = V.conj().T @ op @ V
            labels, rotation = scipy.linalg.eigh((restricted + restricted.conj().T) / 2)
            V = V @ rotation
            if np.diff(labels).min() > ORTHONORMAL_TOL:
                break
        vectors[:, cluster] = V
        logger.debug(
            "Resolved %d-fold degenerate eigenspace at %.12g", cluster.size, values[cluster[0]]
        )
    return vectors


def diagonalize(H: ManyBodyOperator | np.ndarray) -> EigenSystem:
    """Diagonalize a Hermitian operator and validate the decomposition.

    Inside an eigenspace that is degenerate to round-off, eigenvectors are
    fixed by SOI/bath exchange parity (when both factors have equal dimension)
    and then by basis-label order, so repeated calls agree.

    Args:
        H: Operator or raw Hermitian matrix

    Returns:
        EigenSystem with ascending eigenvalues; ``degenerate`` is set when any
        gap is below 1e-8 of the spectral range.
    """
    if isinstance(H, ManyBodyOperator):
        matrix, basis = H.matrix, H.basis
    else:
        matrix = np.asarray(H, dtype=complex)
        check_hermitian(matrix)
        basis = BipartiteBasis(1, matrix.shape[0])

    try:
        values, vectors = scipy.linalg.eigh(matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceError(
            "eigensolver did not converge", {"dimension": matrix.shape[0], "cause": str(e)}
        ) from e

    scale = energy_scale(values)
    gaps = np.diff(values)
    degenerate = bool(gaps.size and gaps.min() < DEGENERACY_RTOL * scale)
    if degenerate:
        logger.warning(
            "Degenerate spectrum (min gap %.3e); non-degeneracy assumption violated",
            gaps.min(),
        )
        vectors = _resolve_degenerate(values, vectors, basis, EXACT_DEGENERACY_RTOL * scale)

    residual = np.linalg.norm(matrix @ vectors - vectors * values, axis=0).max(initial=0.0)
    if residual > RESIDUAL_RTOL * scale:
        raise NumericConsistencyError(
            "eigenpair residual too large", {"residual": residual, "scale": scale}
        )
    overlap = np.abs(vectors.conj().T @ vectors - np.eye(len(values))).max(initial=0.0)
    if overlap > ORTHONORMAL_TOL:
        raise NumericConsistencyError("eigenvectors not orthonormal", {"deviation": overlap})

    return EigenSystem(values=values, vectors=vectors, degenerate=degenerate)
