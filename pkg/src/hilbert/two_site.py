"""Two-site fermionic model: one spin species is the SOI, the other the bath.

Basis order is ``|0↑0↓⟩, |0↑x↓⟩, |x↑0↓⟩, |x↑x↓⟩``. The up-spin occupation is the
bath index (varies slower) and the down-spin occupation is the SOI index.
"""

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import InvalidInputError
from .basis import BipartiteBasis, ManyBodyOperator

logger = logging.getLogger(__name__)

TWO_SITE_BASIS = BipartiteBasis(soi_dim=2, bath_dim=2)
STATE_LABELS = ("0u0d", "0uxd", "xu0d", "xuxd")


@dataclass(frozen=True)
class TwoSiteParams:
    """Energy scale, complex hopping/dipole and interaction strengths."""

    omega0: float
    omega_d: complex
    V00: float
    V0x: float
    Vxx: float
    J0x: float

    def __post_init__(self):
        object.__setattr__(self, "omega_d", complex(self.omega_d))
        for name in ("omega0", "V00", "V0x", "Vxx", "J0x"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError) as e:
                raise InvalidInputError(f"{name} must be a real number, got {value!r}") from e
            if not math.isfinite(value):
                raise InvalidInputError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not (math.isfinite(self.omega_d.real) and math.isfinite(self.omega_d.imag)):
            raise InvalidInputError(f"omega_d must be finite, got {self.omega_d}")

    def negated(self) -> "TwoSiteParams":
        """Parameters of the model ``-H``; the Hamiltonian is linear in every field."""
        return TwoSiteParams(
            omega0=-self.omega0,
            omega_d=-self.omega_d,
            V00=-self.V00,
            V0x=-self.V0x,
            Vxx=-self.Vxx,
            J0x=-self.J0x,
        )

    def replace(self, **changes) -> "TwoSiteParams":
        values = asdict(self)
        values.update(changes)
        return TwoSiteParams(**values)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["omega_d"] = [self.omega_d.real, self.omega_d.imag]
        return data


def static_block(params: TwoSiteParams) -> np.ndarray:
    """Block with the bath site empty (up-spin in orbital 0)."""
    w0, wd = params.omega0, params.omega_d
    return np.array(
        [
            [params.V00 - 1.5 * w0, np.conj(wd) / 2],
            [wd / 2, params.V0x - 0.5 * w0],
        ],
        dtype=complex,
    )


def excited_block(params: TwoSiteParams) -> np.ndarray:
    """Block with the up-spin in orbital x."""
    w0, wd = params.omega0, params.omega_d
    return np.array(
        [
            [params.V0x - 0.5 * w0, np.conj(wd) / 2],
            [wd / 2, params.Vxx + 0.5 * w0],
        ],
        dtype=complex,
    )


def coupling_block(params: TwoSiteParams) -> np.ndarray:
    """Lower-left block ``C_0x``; the upper-right block is its adjoint."""
    wd = params.omega_d
    return np.array([[wd / 2, 0], [params.J0x, wd / 2]], dtype=complex)


def build_two_site(params: TwoSiteParams) -> ManyBodyOperator:
    """Assemble the 4×4 Hamiltonian ``[[H_S, C0x†], [C0x, H_x]]``."""
    C0x = coupling_block(params)
    matrix = np.block(
        [
            [static_block(params), C0x.conj().T],
            [C0x, excited_block(params)],
        ]
    )
    logger.debug("Built two-site Hamiltonian for %s", params)
    return ManyBodyOperator(TWO_SITE_BASIS, matrix)
