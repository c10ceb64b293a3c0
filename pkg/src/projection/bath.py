"""Bath states and the Bloch-sphere rotations that generate them."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..hilbert.pauli import pauli_vector

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
AXIS_TOL = 1e-12

Provenance = tuple[tuple[float, float, float], float]


@dataclass(frozen=True, eq=False)
class BathState:
    """Unit vector in the bath factor; ``provenance`` records the (axis, angle) used."""

    amplitudes: np.ndarray = field(repr=False)
    provenance: Provenance | None = None

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if amplitudes.size == 0 or not np.all(np.isfinite(amplitudes)):
            raise InvalidInputError("bath state must be a non-empty finite vector")
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInputError(f"bath state is not normalized (norm {norm:.15f})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def normalized(cls, amplitudes, provenance: Provenance | None = None) -> "BathState":
        """Build a state from arbitrary non-zero amplitudes by normalizing them."""
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(amplitudes))
        if norm == 0 or not math.isfinite(norm):
            raise InvalidInputError("cannot normalize a zero or non-finite bath vector")
        return cls(amplitudes / norm, provenance)

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class BlochRotation:
    """Rotation by ``angle`` about the unit ``axis`` on a pair of bath levels."""

    axis: tuple[float, float, float]
    angle: float

    def __post_init__(self):
        axis = tuple(float(a) for a in np.asarray(self.axis, dtype=float).reshape(-1))
        if len(axis) != 3 or not all(math.isfinite(a) for a in axis):
            raise InvalidInputError(f"rotation axis must be a finite 3-vector, got {self.axis!r}")
        norm = math.sqrt(sum(a * a for a in axis))
        if abs(norm - 1.0) > AXIS_TOL:
            raise InvalidInputError(f"rotation axis must have unit norm, got {norm:.15f}")
        if not math.isfinite(self.angle):
            raise InvalidInputError(f"rotation angle must be finite, got {self.angle}")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "angle", float(self.angle))

    @classmethod
    def from_spherical(cls, theta: float, azimuth: float, angle: float) -> "BlochRotation":
        """Axis given by polar angle ``theta`` and ``azimuth`` on the unit sphere."""
        axis = (
            math.sin(theta) * math.cos(azimuth),
            math.sin(theta) * math.sin(azimuth),
            math.cos(theta),
        )
        norm = math.sqrt(sum(a * a for a in axis))
        return cls(tuple(a / norm for a in axis), angle)


def bloch_unitary(rot: BlochRotation) -> np.ndarray:
    """U = cos(φ/2) I − i (n·σ) sin(φ/2)."""
    half = rot.angle / 2
    n_sigma = np.tensordot(np.asarray(rot.axis), pauli_vector(), axes=1)
    return math.cos(half) * np.eye(2, dtype=complex) - 1j * math.sin(half) * n_sigma


def rotation_coefficients(rot: BlochRotation) -> tuple[complex, complex]:
    """Amplitudes (ψ0, ψx) of U|0⟩ in closed form."""
    nx, ny, nz = rot.axis
    c, s = math.cos(rot.angle / 2), math.sin(rot.angle / 2)
    return complex(c, -nz * s), complex(ny * s, -nx * s)


def check_pair(pair: tuple[int, int], dimension: int) -> tuple[int, int]:
    i, j = (int(p) for p in pair)
    if i == j:
        raise InvalidInputError(f"rotation pair indices must differ, got {pair!r}")
    if not (0 <= i < dimension and 0 <= j < dimension):
        raise InvalidInputError(f"rotation pair {pair!r} outside bath dimension {dimension}")
    return i, j


def canonical_bath_state(dimension: int, index: int = 0) -> BathState:
    if not 0 <= index < dimension:
        raise InvalidInputError(f"bath index {index} outside 0..{dimension - 1}")
    amplitudes = np.zeros(dimension, dtype=complex)
    amplitudes[index] = 1.0
    return BathState(amplitudes)


def rotate_bath_state(
    base: BathState, rot: BlochRotation, pair: tuple[int, int] = (0, 1)
) -> BathState:
    """Apply the 2×2 Bloch unitary to the amplitudes at ``pair``; other levels are untouched."""
    i, j = check_pair(pair, base.dimension)
    amplitudes = np.array(base.amplitudes, copy=True)
    amplitudes[[i, j]] = bloch_unitary(rot) @ base.amplitudes[[i, j]]
    # Re-normalize to keep round-off from accumulating across chained rotations
    amplitudes /= np.linalg.norm(amplitudes)
    return BathState(amplitudes, provenance=(rot.axis, rot.angle))


def partner_bath_state(
    rot: BlochRotation, dimension: int = 2, pair: tuple[int, int] = (0, 1)
) -> BathState:
    """Rotated image U|x⟩ of the second level of ``pair``; orthogonal to U|0⟩."""
    i, j = check_pair(pair, dimension)
    return rotate_bath_state(canonical_bath_state(dimension, j), rot, (i, j))
