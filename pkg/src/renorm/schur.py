"""Schur-complement renormalized interaction M(ω) = C (ω − H_R)⁻¹ C†."""

import logging

import numpy as np
import scipy.linalg

from ..errors import PoleProximityError
from ..projection.blocks import ProjectionBlocks

logger = logging.getLogger(__name__)

POLE_WINDOW_RTOL = 1e-6


def pole_window(blocks: ProjectionBlocks) -> float:
    """Half-width δ_pole of the exclusion window around each rest-space pole."""
    return POLE_WINDOW_RTOL * blocks.spectral_range


def check_pole_distance(
    blocks: ProjectionBlocks, omega: float, window: float | None = None
) -> None:
    """Raise ``PoleProximityError`` if ``omega`` lies within ``window`` of a pole."""
    poles = blocks.poles
    if poles.size == 0:
        return
    window = pole_window(blocks) if window is None else window
    distances = np.abs(omega - poles)
    nearest = int(np.argmin(distances))
    if distances[nearest] <= window:
        raise PoleProximityError(float(omega), float(poles[nearest]), float(window))


def resolvent_solve(
    blocks: ProjectionBlocks, omega: float, rhs: np.ndarray, window: float | None = None
) -> np.ndarray:
    """Solve (ω − H_R) X = rhs without forming the inverse."""
    check_pole_distance(blocks, omega, window)
    shifted = omega * np.eye(blocks.rest_dim) - blocks.H_R
    return scipy.linalg.solve(shifted, rhs, assume_a="her")


def schur_M(blocks: ProjectionBlocks, omega: float, window: float | None = None) -> np.ndarray:
    """Renormalized interaction at real ``omega``, Hermitian by construction."""
    d = blocks.soi_dim
    if blocks.rest_dim == 0:
        return np.zeros((d, d), dtype=complex)
    X = resolvent_solve(blocks, omega, blocks.C.conj().T, window)
    M = blocks.C @ X
    return (M + M.conj().T) / 2


def renormalized_hamiltonian(
    blocks: ProjectionBlocks, omega: float, window: float | None = None
) -> np.ndarray:
    """H^R(ω) = H_S + ε M(ω)."""
    if blocks.epsilon == 0:
        return np.array(blocks.H_S, copy=True)
    return blocks.H_S + blocks.epsilon * schur_M(blocks, omega, window)


def analytic_slope(
    blocks: ProjectionBlocks, omega: float, eigvec: np.ndarray, window: float | None = None
) -> float:
    """−ε x†x with (ω − H_R) x = C† v; the derivative of the eigenvalue of ``v``."""
    if blocks.epsilon == 0 or blocks.rest_dim == 0:
        return 0.0
    x = resolvent_solve(blocks, omega, blocks.C.conj().T @ eigvec, window)
    return -blocks.epsilon * float(np.real(np.vdot(x, x)))
