"""Coupling kernel K = C C† and the kernel form of the separability loss."""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..errors import DegenerateKernelError
from ..projection.blocks import ProjectionBlocks
from .fixed_points import FixedPointRecord
from .schur import resolvent_solve

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-10
PROJECTOR_TOL = 1e-10
ZERO_COUPLING_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class CouplingKernel:
    """Positive matrix built from the singular values Γ of the coupling block."""

    K: np.ndarray = field(repr=False)
    K_in_static_basis: np.ndarray = field(repr=False)
    rank_deficient: bool
    singular_values: np.ndarray
    left_vectors: np.ndarray = field(repr=False)
    projector_residual: float | None = None
    closed_form_discrepancy: float = 0.0

    @property
    def eigenvalues(self) -> np.ndarray:
        return scipy.linalg.eigvalsh(self.K)

    def inverse(self) -> np.ndarray:
        if self.rank_deficient:
            raise DegenerateKernelError(
                "kernel is singular", {"singular_values": self.singular_values.tolist()}
            )
        gamma2 = self.singular_values**2
        U = self.left_vectors
        return (U / gamma2) @ U.conj().T


@dataclass(frozen=True)
class KernelEstimate:
    """Kernel-form and resolvent-form values of 1/Z − 1 at one fixed point."""

    kernel_value: float
    double_sum: float
    exact: float
    discrepancy: float


def kernel_build(blocks: ProjectionBlocks) -> CouplingKernel:
    """SVD of ``C``; tabulates ``K`` in the static eigenbasis.

    Raises:
        DegenerateKernelError: ``C`` vanishes
    """
    C = blocks.C
    d = blocks.soi_dim
    if C.size == 0 or np.abs(C).max() <= ZERO_COUPLING_TOL:
        raise DegenerateKernelError("coupling block is zero", {"shape": C.shape})

    U, gamma, _ = scipy.linalg.svd(C, full_matrices=True)
    gamma2 = np.zeros(d)
    gamma2[: gamma.size] = gamma**2
    singular_values = np.sqrt(gamma2)
    K = (U * gamma2) @ U.conj().T
    K = (K + K.conj().T) / 2

    rank_deficient = bool(
        blocks.rest_dim < d or singular_values.min() < RANK_RTOL * singular_values.max()
    )
    static = blocks.static.vectors
    K_static = static.conj().T @ K @ static

    # K written as U†ΓΓ†U; compared against CC† for the record
    closed_form = U.conj().T @ np.diag(gamma2) @ U
    closed_form_discrepancy = float(np.abs(closed_form - K).max())
    logger.debug("U†ΓΓ†U differs from CC† by %.3e", closed_form_discrepancy)

    residual = None
    if rank_deficient:
        logger.warning("Coupling block is rank deficient; kernel is not invertible")
    else:
        P = C.conj().T @ ((U / gamma2) @ U.conj().T) @ C
        residual = float(max(np.abs(P @ P - P).max(), np.abs(P - P.conj().T).max()))
        if residual > PROJECTOR_TOL:
            logger.warning("C†K⁻¹C deviates from a projector by %.3e", residual)

    return CouplingKernel(
        K=K,
        K_in_static_basis=K_static,
        rank_deficient=rank_deficient,
        singular_values=singular_values,
        left_vectors=U,
        projector_residual=residual,
        closed_form_discrepancy=closed_form_discrepancy,
    )


def kernel_quadratic_form(
    blocks: ProjectionBlocks, kernel: CouplingKernel, fixed_point: FixedPointRecord
) -> KernelEstimate:
    """(1/ε)⟨R|(ω_λ − H_S) K⁻¹ (ω_λ − H_S)|R⟩ next to the exact value ε x†x.

    The two agree when the resolvent image (ω_λ − H_R)⁻¹C†|R⟩ lies in the row
    space of ``C``; otherwise the kernel value is the smaller one.
    """
    K_inv = kernel.inverse()
    epsilon = blocks.epsilon
    omega = fixed_point.omega_lambda
    R = fixed_point.eigenvector / np.linalg.norm(fixed_point.eigenvector)
    if epsilon == 0:
        return KernelEstimate(0.0, 0.0, 0.0, 0.0)

    v = (omega * np.eye(blocks.soi_dim) - blocks.H_S) @ R
    kernel_value = float(np.real(np.vdot(v, K_inv @ v))) / epsilon

    static = blocks.static
    coefficients = static.vectors.conj().T @ R
    detuned = (omega - static.values) * coefficients
    K_static_inv = scipy.linalg.inv(kernel.K_in_static_basis)
    double_sum = float(np.real(np.einsum("s,st,t->", detuned.conj(), K_static_inv, detuned)))
    double_sum /= epsilon

    x = resolvent_solve(blocks, omega, blocks.C.conj().T @ R)
    exact = epsilon * float(np.real(np.vdot(x, x)))
    return KernelEstimate(
        kernel_value=kernel_value,
        double_sum=double_sum,
        exact=exact,
        discrepancy=exact - kernel_value,
    )
