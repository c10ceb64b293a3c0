"""Retarded impurity Green's function and the effective two-level picture.

Convention: G(ω) = 1/(ω − ω_S + iΔ0) and G(t) = −iΘ(t) e^{−iω_S t − Δ0 t}, with
Δ0 the Lorentzian half-width.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd
import scipy.linalg
from scipy import integrate

from ..errors import InvalidInputError

logger = logging.getLogger(__name__)


def _check_width(delta0: float) -> float:
    if not (math.isfinite(delta0) and delta0 >= 0):
        raise InvalidInputError(f"delta0 must be finite and non-negative, got {delta0}")
    return float(delta0)


def _check_times(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float).reshape(-1)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise InvalidInputError("time grid must be finite and non-negative")
    return t


def greens_frequency(omega, omega_S: float, delta0: float):
    """Retarded G(ω) = 1/(ω − ω_S + iΔ0)."""
    delta0 = _check_width(delta0)
    return 1.0 / (np.asarray(omega, dtype=float) - omega_S + 1j * delta0)


def greens_time(omega_S: float, delta0: float, t_grid) -> np.ndarray:
    """G(t) = −i exp(−iω_S t − Δ0 t) for t ≥ 0."""
    delta0 = _check_width(delta0)
    t = _check_times(t_grid)
    return -1j * np.exp(-1j * omega_S * t - delta0 * t)


def greens_time_numeric(omega_S: float, delta0: float, t_grid) -> np.ndarray:
    """−i ∫ A(ω) e^{−iωt} dω by adaptive Fourier quadrature of the Lorentzian A."""
    delta0 = _check_width(delta0)
    t = _check_times(t_grid)
    if delta0 == 0:
        return -1j * np.exp(-1j * omega_S * t)

    def lorentzian(x):
        return delta0 / math.pi / (x * x + delta0 * delta0)

    envelope = np.empty(t.size)
    for i, time in enumerate(t):
        if time == 0:
            value, _ = integrate.quad(lorentzian, 0, np.inf)
        else:
            value, _ = integrate.quad(lorentzian, 0, np.inf, weight="cos", wvar=time)
        # A is even about ω_S, so the sine part vanishes
        envelope[i] = 2 * value
    return -1j * np.exp(-1j * omega_S * t) * envelope


@dataclass(frozen=True)
class EffectiveTwoLevel:
    """Non-Hermitian H_eff = [[ω_S, Δ0], [−Δ0, ω_S]]."""

    omega_S: float
    delta0: float

    def __post_init__(self):
        object.__setattr__(self, "delta0", _check_width(self.delta0))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.omega_S, self.delta0], [-self.delta0, self.omega_S]], dtype=complex
        )

    @cached_property
    def _modes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        values, left, right = scipy.linalg.eig(self.matrix, left=True, right=True)
        order = np.argsort(values.imag)
        values, left, right = values[order], left[:, order], right[:, order]
        # biorthonormal: ⟨w_k|v_k⟩ = 1
        norms = np.einsum("ik,ik->k", left.conj(), right)
        return values, left, right / norms

    @property
    def eigenvalues(self) -> np.ndarray:
        """ω_S − iΔ0 followed by ω_S + iΔ0."""
        return self._modes[0]

    def decaying_propagator(self, t_grid) -> np.ndarray:
        """−i⟨w₋|e^{−iH_eff t}|v₋⟩ for the mode with eigenvalue ω_S − iΔ0."""
        t = _check_times(t_grid)
        _, left, right = self._modes
        w, v = left[:, 0], right[:, 0]
        return np.array(
            [-1j * np.vdot(w, scipy.linalg.expm(-1j * self.matrix * s) @ v) for s in t]
        )

    def literal_propagator(self, t_grid) -> np.ndarray:
        """−i(e^{−iH_eff t})₀₀, which equals −i e^{−iω_S t} cosh(Δ0 t)."""
        t = _check_times(t_grid)
        return np.array([-1j * scipy.linalg.expm(-1j * self.matrix * s)[0, 0] for s in t])


def effective_two_level(omega_S: float, delta0: float) -> tuple[EffectiveTwoLevel, np.ndarray]:
    model = EffectiveTwoLevel(float(omega_S), delta0)
    return model, model.eigenvalues


def greens_frame(omega_S: float, delta0: float, t_grid, numeric: bool = True) -> pd.DataFrame:
    """Time-domain table: t, re_G, im_G, abs_G, then the cross-check columns."""
    t = _check_times(t_grid)
    G = greens_time(omega_S, delta0, t)
    model, _ = effective_two_level(omega_S, delta0)
    decay = model.decaying_propagator(t)
    literal = model.literal_propagator(t)
    frame = pd.DataFrame(
        {
            "t": t,
            "re_G": G.real,
            "im_G": G.imag,
            "abs_G": np.abs(G),
            "abs_G_two_level_decay": np.abs(decay),
            "abs_G_two_level_literal": np.abs(literal),
        }
    )
    if numeric:
        frame["abs_G_numeric"] = np.abs(greens_time_numeric(omega_S, delta0, t))
    return frame
