"""Lorentzian weight factor of a weakly coupled static eigenstate."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..errors import DegenerateKernelError, InvalidInputError
from ..projection.blocks import ProjectionBlocks
from ..renorm.fixed_points import FixedPointRecord
from ..renorm.kernel import CouplingKernel

logger = logging.getLogger(__name__)

DEFAULT_CUTOFF_WIDTHS = 50.0


@dataclass(frozen=True)
class LorentzianModel:
    omega_S: float
    half_width: float
    cutoff: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.half_width) and self.half_width > 0):
            raise InvalidInputError(f"half_width must be positive, got {self.half_width}")
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", DEFAULT_CUTOFF_WIDTHS * self.half_width)
        if not self.cutoff > self.half_width:
            raise InvalidInputError(
                f"cutoff {self.cutoff} must exceed the half-width {self.half_width}"
            )

    @property
    def peak(self) -> float:
        return 1.0 / (math.pi * self.half_width)

    @classmethod
    def from_kernel(
        cls,
        blocks: ProjectionBlocks,
        kernel: CouplingKernel,
        static_index: int,
        cutoff: float | None = None,
    ) -> "LorentzianModel":
        """Half-width √(ε K_SS) centred on the static eigenvalue."""
        K_SS = float(np.real(kernel.K_in_static_basis[static_index, static_index]))
        if blocks.epsilon * K_SS <= 0:
            raise DegenerateKernelError(
                "Lorentzian width vanishes", {"epsilon": blocks.epsilon, "K_SS": K_SS}
            )
        return cls(
            omega_S=float(blocks.static.values[static_index]),
            half_width=math.sqrt(blocks.epsilon * K_SS),
            cutoff=cutoff,
        )


def lorentzian_weight(model: LorentzianModel, omega):
    """(1/(π hw)) / (1 + (ω − ω_S)²/hw²) inside the cutoff window."""
    omega_arr = np.asarray(omega, dtype=float)
    offset = omega_arr - model.omega_S
    if np.any(np.abs(offset) >= model.cutoff):
        raise InvalidInputError(
            f"frequency outside cutoff window |omega - omega_S| < {model.cutoff}"
        )
    weight = model.peak / (1.0 + (offset / model.half_width) ** 2)
    return float(weight) if np.ndim(omega) == 0 else weight


def lorentzian_integral(model: LorentzianModel) -> float:
    """∫ 𝒲̃ dω over the cutoff window; 1 minus the tail mass."""
    value, _ = integrate.quad(
        lambda w: model.peak / (1.0 + ((w - model.omega_S) / model.half_width) ** 2),
        model.omega_S - model.cutoff,
        model.omega_S + model.cutoff,
        points=[model.omega_S],
        limit=200,
    )
    return float(value)


def rescaled_weights(
    records: list[FixedPointRecord], model: LorentzianModel
) -> list[tuple[float, float]]:
    """(ω_λ, π·hw·W) for every fixed point inside the cutoff window."""
    scale = math.pi * model.half_width
    return [
        (r.omega_lambda, scale * r.W)
        for r in records
        if abs(r.omega_lambda - model.omega_S) < model.cutoff
    ]
