"""Pauli matrices."""

import numpy as np

from ..errors import InvalidInputError

_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(axis_index: int) -> np.ndarray:
    """Return a fresh copy of σ¹, σ² or σ³."""
    if axis_index not in _PAULI:
        raise InvalidInputError(f"Pauli axis must be 1, 2 or 3, got {axis_index!r}")
    return _PAULI[axis_index].copy()


def pauli_vector() -> np.ndarray:
    """Stack (σ¹, σ², σ³) into a ``(3, 2, 2)`` array for contraction with an axis."""
    return np.stack([pauli(k) for k in (1, 2, 3)])
