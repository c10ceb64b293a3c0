"""Weak-coupling expansions around a static eigenpair."""

import logging

import numpy as np

from ..errors import ConvergenceError, DegenerateKernelError, InvalidInputError
from ..projection.blocks import ProjectionBlocks, with_epsilon
from ..renorm.curves import trace_curves
from ..renorm.fixed_points import find_fixed_points
from ..renorm.kernel import CouplingKernel
from ..renorm.schur import schur_M

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 200
DAMPING = 0.5
CONVERGENCE_RTOL = 1e-12
GAP_RTOL = 1e-8
KERNEL_FLOOR = 1e-14
SCALING_EPSILONS = (1e-3, 3e-3, 1e-2, 3e-2, 1e-1)


def _epsilon(blocks: ProjectionBlocks, epsilon: float | None) -> float:
    if epsilon is None:
        return blocks.epsilon
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidInputError(f"epsilon must lie in [0, 1], got {epsilon}")
    return float(epsilon)


def static_matrix_element(blocks: ProjectionBlocks, omega: float, i: int, j: int) -> complex:
    """⟨S_i|M(ω)|S_j⟩."""
    static = blocks.static
    return complex(np.vdot(static.vector(i), schur_M(blocks, omega) @ static.vector(j)))


def first_order_eigenvalue(
    blocks: ProjectionBlocks, static_index: int, epsilon: float | None = None
) -> float:
    """Solve ω = ω_S + ε M_SS(ω) by damped fixed-point iteration from ω_S.

    Raises:
        ConvergenceError: no convergence within 200 iterations
        PoleProximityError: an iterate hits a rest-space pole
    """
    epsilon = _epsilon(blocks, epsilon)
    omega_s = float(blocks.static.values[static_index])
    if epsilon == 0:
        return omega_s

    tol = CONVERGENCE_RTOL * blocks.spectral_range
    omega = omega_s
    for iteration in range(1, MAX_ITERATIONS + 1):
        M_SS = static_matrix_element(blocks, omega, static_index, static_index).real
        target = omega_s + epsilon * M_SS
        updated = (1 - DAMPING) * omega + DAMPING * target
        if abs(updated - omega) <= tol:
            logger.debug("First-order eigenvalue converged after %d iterations", iteration)
            return updated
        omega = updated
    raise ConvergenceError(
        "first-order eigenvalue iteration did not converge",
        {"static_index": static_index, "epsilon": epsilon, "last": omega},
    )


def lippmann_schwinger_state(
    blocks: ProjectionBlocks, static_index: int, epsilon: float | None = None
) -> np.ndarray:
    """|S⟩ + ε Σ_{S'≠S} ⟨S'|M(ω_λ)|S⟩/(ω_S − ω_S') |S'⟩, normalized, in SOI coordinates."""
    epsilon = _epsilon(blocks, epsilon)
    static = blocks.static
    values = static.values
    omega_s = float(values[static_index])
    others = np.delete(np.arange(values.size), static_index)
    gaps = omega_s - values[others]
    if gaps.size and np.abs(gaps).min() < GAP_RTOL * blocks.spectral_range:
        raise InvalidInputError(
            f"static level {static_index} is near-degenerate (gap {np.abs(gaps).min():.3e})"
        )

    coefficients = np.zeros(values.size, dtype=complex)
    coefficients[static_index] = 1.0
    if epsilon > 0 and others.size:
        omega = first_order_eigenvalue(blocks, static_index, epsilon)
        M_static = static.vectors.conj().T @ schur_M(blocks, omega) @ static.vectors
        coefficients[others] = epsilon * M_static[others, static_index] / gaps

    state = static.vectors @ coefficients
    return state / np.linalg.norm(state)


def slope_rpa(
    blocks: ProjectionBlocks,
    kernel: CouplingKernel | None,
    static_index: int,
    omega_lambda: float,
    epsilon: float | None = None,
) -> float:
    """ε M_SS(ω_λ)² / K_SS, the diagonal estimate of −dω_R/dω.

    Raises:
        DegenerateKernelError: K_SS below 1e-14 for a non-zero coupling
    """
    epsilon = _epsilon(blocks, epsilon)
    if not np.any(blocks.C) or epsilon == 0:
        return 0.0
    if kernel is None:
        raise DegenerateKernelError("a kernel is required for non-zero coupling")
    K_SS = float(np.real(kernel.K_in_static_basis[static_index, static_index]))
    if K_SS < KERNEL_FLOOR:
        raise DegenerateKernelError("diagonal kernel element vanishes", {"K_SS": K_SS})
    M_SS = static_matrix_element(blocks, omega_lambda, static_index, static_index).real
    return epsilon * M_SS**2 / K_SS


def scaling_exponent(epsilons, errors) -> float:
    """Least-squares slope of log(error) against log(ε)."""
    epsilons = np.asarray(epsilons, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if epsilons.shape != errors.shape or epsilons.size < 2:
        raise InvalidInputError("need at least two matching (epsilon, error) samples")
    if np.any(epsilons <= 0) or np.any(errors <= 0):
        raise InvalidInputError("scaling fit needs positive epsilons and errors")
    slope, _ = np.polyfit(np.log(epsilons), np.log(errors), 1)
    return float(slope)


def scaling_errors(
    blocks: ProjectionBlocks, static_index: int, epsilons=SCALING_EPSILONS
) -> dict[str, list[float]]:
    """Errors of the weak-coupling estimates against exact results for each ε.

    Keys: ``similarity_loss`` (1 − z), ``eigenvalue`` (|ω_λ − first order|) and
    ``state`` (‖|R⟩ − first-order state‖).
    """
    results = {"epsilon": [], "similarity_loss": [], "eigenvalue": [], "state": []}
    static = blocks.static
    omega_s = float(static.values[static_index])
    scale = blocks.spectral_range
    for eps in epsilons:
        scaled = with_epsilon(blocks, eps)
        approx = first_order_eigenvalue(scaled, static_index)
        half_width = 0.05 * scale
        curves = trace_curves(scaled, omega_s - half_width, omega_s + half_width, 16)
        records = find_fixed_points(curves, scaled, static_index=static_index)
        exact = min(records, key=lambda r: abs(r.omega_lambda - approx))
        state = lippmann_schwinger_state(scaled, static_index)
        R = exact.eigenvector * np.exp(-1j * np.angle(np.vdot(state, exact.eigenvector)))
        results["epsilon"].append(float(eps))
        results["similarity_loss"].append(1.0 - exact.z)
        results["eigenvalue"].append(abs(exact.omega_lambda - approx))
        results["state"].append(float(np.linalg.norm(R - state)))
    return results
