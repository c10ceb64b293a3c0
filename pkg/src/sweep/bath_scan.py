"""Scans of eigenstate separability over Bloch-rotated bath states."""

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from ..errors import InvalidInputError
from ..hilbert.basis import EigenSystem, ManyBodyOperator, diagonalize
from ..projection.bath import (
    BathState,
    BlochRotation,
    canonical_bath_state,
    check_pair,
    rotate_bath_state,
)
from ..renorm.fixed_points import separability_from_eigensystem

logger = logging.getLogger(__name__)

MIN_RESOLUTION = (8, 8, 16)
REFINE_POINTS = 4
REFINE_ZOOM = 4.0

# Rotation axes used for angle-only sweeps of the two-site model
DEFAULT_AXES = (
    (1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (1 / math.sqrt(2), 0.0, 1 / math.sqrt(2)),
)


@dataclass(frozen=True)
class BathScanSpec:
    """Resolution of the (polar, azimuth, angle) grid search.

    ``polar_cap`` restricts rotation axes to polar angles in ``[0, polar_cap]``;
    None scans the whole sphere.
    """

    n_polar: int = 16
    n_azimuth: int = 32
    n_angle: int = 64
    refine_rounds: int = 2
    polar_cap: float | None = None
    pair: tuple[int, int] = (0, 1)

    def __post_init__(self):
        resolution = (self.n_polar, self.n_azimuth, self.n_angle)
        names = ("n_polar", "n_azimuth", "n_angle")
        for name, value, minimum in zip(names, resolution, MIN_RESOLUTION):
            if not isinstance(value, (int, np.integer)) or value < minimum:
                raise InvalidInputError(f"{name} must be an integer >= {minimum}, got {value!r}")
        if not isinstance(self.refine_rounds, (int, np.integer)) or self.refine_rounds < 0:
            raise InvalidInputError(f"refine_rounds must be >= 0, got {self.refine_rounds!r}")
        if self.polar_cap is not None and not (0 < self.polar_cap <= math.pi):
            raise InvalidInputError(f"polar_cap must lie in (0, pi], got {self.polar_cap}")
        object.__setattr__(self, "pair", tuple(int(p) for p in self.pair))

    @property
    def resolution(self) -> tuple[int, int, int]:
        return (self.n_polar, self.n_azimuth, self.n_angle)

    @property
    def polar_extent(self) -> float:
        return math.pi if self.polar_cap is None else float(self.polar_cap)

    def grids(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Polar angles with both ends, azimuths and rotation angles on [0, 2π)."""
        polar = self.polar_extent * np.arange(self.n_polar + 1) / self.n_polar
        azimuth = 2 * math.pi * np.arange(self.n_azimuth) / self.n_azimuth
        angle = 2 * math.pi * np.arange(self.n_angle) / self.n_angle
        return polar, azimuth, angle

    def spacing(self) -> np.ndarray:
        return np.array(
            [
                self.polar_extent / self.n_polar,
                2 * math.pi / self.n_azimuth,
                2 * math.pi / self.n_angle,
            ]
        )

    def coarser(self) -> "BathScanSpec | None":
        """The nested half-resolution spec, or None below the minimum resolution."""
        halves = tuple(n // 2 for n in self.resolution)
        if any(n % 2 for n in self.resolution) or any(
            h < m for h, m in zip(halves, MIN_RESOLUTION)
        ):
            return None
        return BathScanSpec(*halves, self.refine_rounds, self.polar_cap, self.pair)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["pair"] = list(self.pair)
        return data


@dataclass(frozen=True, eq=False)
class PhiTrace:
    """Z(φ) for every eigenstate while the bath state turns about one axis."""

    axis: tuple[float, float, float]
    phi: np.ndarray
    Z: np.ndarray = field(repr=False)
    energies: np.ndarray = field(repr=False)

    @property
    def maxima(self) -> np.ndarray:
        return self.Z.max(axis=0)

    def to_frame(self) -> pd.DataFrame:
        """Long-format table with columns ``phi, state, energy, Z``."""
        n_phi, n_states = self.Z.shape
        return pd.DataFrame(
            {
                "phi": np.repeat(self.phi, n_states),
                "state": np.tile(np.arange(n_states), n_phi),
                "energy": np.tile(self.energies, n_phi),
                "Z": self.Z.reshape(-1),
            }
        )


@dataclass(frozen=True)
class ScanOptimum:
    """Best bath rotation found for one eigenstate."""

    eig_index: int
    Z_max: float
    rotation: BlochRotation
    theta: float
    azimuth: float


def bath_phi_sweep(
    H: ManyBodyOperator,
    base_bath: BathState,
    axis: tuple[float, float, float],
    phi_steps: int,
    pair: tuple[int, int] = (0, 1),
    eigen: EigenSystem | None = None,
) -> PhiTrace:
    """Z of every eigenstate on a uniform φ grid over [0, 2π], ends included.

    Columns follow ascending eigenvalue order (GS, E1, E2, E3 for two sites).
    """
    if int(phi_steps) != phi_steps or phi_steps < 2:
        raise InvalidInputError(f"phi_steps must be an integer >= 2, got {phi_steps!r}")
    eigen = diagonalize(H) if eigen is None else eigen
    phi = np.linspace(0.0, 2 * math.pi, int(phi_steps))
    rows = []
    for angle in phi:
        bath = rotate_bath_state(base_bath, BlochRotation(axis, float(angle)), pair)
        rows.append(separability_from_eigensystem(H, eigen, bath))
    trace = PhiTrace(
        axis=BlochRotation(axis, 0.0).axis,
        phi=phi,
        Z=np.clip(np.array(rows), 0.0, 1.0),
        energies=np.array(eigen.values),
    )
    logger.debug("Swept %d angles about axis %s", phi.size, trace.axis)
    return trace


@dataclass(frozen=True)
class AxisScanSpec:
    """Angle-only scan: ``phi_steps`` rotations about each of a few fixed axes."""

    axes: tuple[tuple[float, float, float], ...] = DEFAULT_AXES
    phi_steps: int = 129
    pair: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if not isinstance(self.phi_steps, (int, np.integer)) or self.phi_steps < 2:
            raise InvalidInputError(f"phi_steps must be an integer >= 2, got {self.phi_steps!r}")
        if not self.axes:
            raise InvalidInputError("an angle-only scan needs at least one axis")
        axes = tuple(BlochRotation(axis, 0.0).axis for axis in self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "pair", tuple(int(p) for p in self.pair))

    @property
    def resolution(self) -> tuple[int, int]:
        return (len(self.axes), self.phi_steps)

    def to_dict(self) -> dict:
        return {
            "axes": [list(axis) for axis in self.axes],
            "phi_steps": self.phi_steps,
            "pair": list(self.pair),
        }


def scan_axes(
    H: ManyBodyOperator,
    spec: AxisScanSpec | None = None,
    base_bath: BathState | None = None,
    eigen: EigenSystem | None = None,
) -> list[ScanOptimum]:
    """Maximum Z of every eigenstate over rotations about the axes of ``spec`` only."""
    spec = AxisScanSpec() if spec is None else spec
    base = canonical_bath_state(H.basis.bath_dim) if base_bath is None else base_bath
    check_pair(spec.pair, base.dimension)
    eigen = diagonalize(H) if eigen is None else eigen

    best = np.full(len(eigen.values), -np.inf)
    rotations: list[BlochRotation | None] = [None] * best.size
    for axis in spec.axes:
        trace = bath_phi_sweep(H, base, axis, spec.phi_steps, spec.pair, eigen)
        rows = trace.Z.argmax(axis=0)
        for n, row in enumerate(rows):
            if trace.Z[row, n] > best[n]:
                best[n] = trace.Z[row, n]
                rotations[n] = BlochRotation(axis, float(trace.phi[row]))

    optima = []
    for n, rotation in enumerate(rotations):
        nx, ny, nz = rotation.axis
        optima.append(
            ScanOptimum(
                eig_index=n,
                Z_max=float(best[n]),
                rotation=rotation,
                theta=math.acos(max(-1.0, min(1.0, nz))),
                azimuth=math.atan2(ny, nx) % (2 * math.pi),
            )
        )
    return optima


def _unitaries(theta: np.ndarray, azimuth: np.ndarray, angle: np.ndarray) -> np.ndarray:
    """Stack of Bloch unitaries, shape ``(..., 2, 2)``."""
    nx = np.sin(theta) * np.cos(azimuth)
    ny = np.sin(theta) * np.sin(azimuth)
    nz = np.cos(theta)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    U = np.empty(np.broadcast(theta, azimuth, angle).shape + (2, 2), dtype=complex)
    U[..., 0, 0] = c - 1j * s * nz
    U[..., 0, 1] = -s * ny - 1j * s * nx
    U[..., 1, 0] = s * ny - 1j * s * nx
    U[..., 1, 1] = c + 1j * s * nz
    return U


def _rotated_amplitudes(
    base: BathState, pair: tuple[int, int], theta, azimuth, angle
) -> np.ndarray:
    i, j = pair
    U = _unitaries(np.asarray(theta), np.asarray(azimuth), np.asarray(angle))
    states = np.broadcast_to(base.amplitudes, U.shape[:-2] + (base.dimension,)).copy()
    states[..., [i, j]] = np.einsum("...ab,b->...a", U, base.amplitudes[[i, j]])
    return states / np.linalg.norm(states, axis=-1, keepdims=True)


def _bath_densities(H: ManyBodyOperator, eigen: EigenSystem) -> np.ndarray:
    """ρ_bath for every eigenstate, shape ``(n_states, bath_dim, bath_dim)``."""
    W = H.basis.as_matrix(eigen.vectors)
    return np.einsum("asn,bsn->nab", W, W.conj())


def _separability(densities: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Z = ⟨b|ρ_bath|b⟩ for each state in ``states`` (``(..., bath_dim)``) and eigenstate."""
    Z = np.einsum("...a,nab,...b->...n", states.conj(), densities, states).real
    return np.clip(Z, 0.0, 1.0)


def _refine(
    densities: np.ndarray,
    base: BathState,
    spec: BathScanSpec,
    start: np.ndarray,
    start_value: float,
) -> tuple[np.ndarray, float]:
    """Zoomed local grids around ``start``; every round keeps its centre."""
    best, best_value = np.array(start, dtype=float), start_value
    step = spec.spacing()
    offsets = np.arange(-REFINE_POINTS, REFINE_POINTS + 1) / REFINE_ZOOM
    for _ in range(spec.refine_rounds):
        theta, azimuth, angle = np.meshgrid(
            np.clip(best[0] + offsets * step[0], 0.0, spec.polar_extent),
            best[1] + offsets * step[1],
            best[2] + offsets * step[2],
            indexing="ij",
        )
        states = _rotated_amplitudes(base, spec.pair, theta, azimuth, angle)
        values = _separability(densities, states)[..., 0]
        flat = int(np.argmax(values))
        if values.flat[flat] > best_value:
            best_value = float(values.flat[flat])
            best = np.array([theta.flat[flat], azimuth.flat[flat], angle.flat[flat]])
        step = step / REFINE_ZOOM
    return best, best_value


def _scan_level(
    densities: np.ndarray, base: BathState, spec: BathScanSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Refined optimum per eigenstate at one grid resolution."""
    polar, azimuth, angle = spec.grids()
    theta_g, azimuth_g, angle_g = np.meshgrid(polar, azimuth, angle, indexing="ij")
    states = _rotated_amplitudes(base, spec.pair, theta_g, azimuth_g, angle_g)
    Z = _separability(densities, states).reshape(-1, densities.shape[0])
    points = np.stack([theta_g.reshape(-1), azimuth_g.reshape(-1), angle_g.reshape(-1)], axis=1)

    values = np.empty(densities.shape[0])
    arguments = np.empty((densities.shape[0], 3))
    for n in range(densities.shape[0]):
        flat = int(np.argmax(Z[:, n]))
        arguments[n], values[n] = _refine(
            densities[n : n + 1], base, spec, points[flat], float(Z[flat, n])
        )
    return values, arguments


def scan_all_states(
    H: ManyBodyOperator,
    spec: BathScanSpec | None = None,
    base_bath: BathState | None = None,
    eigen: EigenSystem | None = None,
) -> list[ScanOptimum]:
    """Maximum Z over rotated bath states for every eigenstate of ``H``.

    The search runs at ``spec`` and at each nested half resolution down to the
    minimum, keeping the best refined candidate per eigenstate, so doubling
    the resolution never lowers a result.
    """
    spec = BathScanSpec() if spec is None else spec
    base = canonical_bath_state(H.basis.bath_dim) if base_bath is None else base_bath
    check_pair(spec.pair, base.dimension)
    eigen = diagonalize(H) if eigen is None else eigen
    densities = _bath_densities(H, eigen)

    values, arguments = _scan_level(densities, base, spec)
    level = spec.coarser()
    while level is not None:
        coarse_values, coarse_arguments = _scan_level(densities, base, level)
        better = coarse_values > values
        values = np.where(better, coarse_values, values)
        arguments = np.where(better[:, None], coarse_arguments, arguments)
        level = level.coarser()

    optima = []
    for n, (theta, azimuth, angle) in enumerate(arguments):
        optima.append(
            ScanOptimum(
                eig_index=n,
                Z_max=float(values[n]),
                rotation=BlochRotation.from_spherical(theta, azimuth, angle),
                theta=float(theta),
                azimuth=float(azimuth),
            )
        )
    logger.debug(
        "Scanned bath states at resolution %s: Z_max = %s",
        spec.resolution,
        np.array2string(values, precision=6),
    )
    return optima


def max_separability(
    H: ManyBodyOperator,
    eig_index: int,
    spec: BathScanSpec | None = None,
    base_bath: BathState | None = None,
) -> tuple[float, BlochRotation]:
    """Largest Z of eigenstate ``eig_index`` over Bloch-rotated bath states."""
    eigen = diagonalize(H)
    eigen.vector(eig_index)
    optimum = scan_all_states(H, spec, base_bath, eigen)[eig_index]
    return optimum.Z_max, optimum.rotation
