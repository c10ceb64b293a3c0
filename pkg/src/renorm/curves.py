"""Branch-tracked eigenvalue curves of the renormalized Hamiltonian H^R(ω)."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ..errors import EmptyGridError, InvalidInputError
from ..projection.blocks import ProjectionBlocks
from .schur import analytic_slope, pole_window, renormalized_hamiltonian

logger = logging.getLogger(__name__)

OVERLAP_THRESHOLD = 0.5
MAX_REFINEMENTS = 4
# Segment edges sit this far (relative to the window) outside each pole window
EDGE_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class InteractionCurves:
    """Sampled branches ω_R(ω) with the pole structure of the rest space.

    ``values[i, k]`` and ``vectors[i, :, k]`` belong to branch ``k`` at
    ``omega_grid[i]``. Branch labels restart in ascending order at the first
    sample of every pole-free segment.
    """

    omega_grid: np.ndarray
    values: np.ndarray = field(repr=False)
    vectors: np.ndarray = field(repr=False)
    slopes: np.ndarray = field(repr=False)
    segments: np.ndarray = field(repr=False)
    poles: np.ndarray
    window: float
    omega_min: float
    omega_max: float
    epsilon: float
    tracking_ok: bool = True

    @property
    def n_branches(self) -> int:
        return self.values.shape[1]

    @property
    def n_samples(self) -> int:
        return self.omega_grid.shape[0]

    @property
    def excluded_windows(self) -> list[tuple[float, float]]:
        return [(float(p - self.window), float(p + self.window)) for p in self.poles]

    def segment_bounds(self, window: float | None = None) -> list[tuple[int, float, float]]:
        """Pole-free intervals ``(segment, lo, hi)`` clipped to the sampled range."""
        window = self.window if window is None else window
        edges = np.concatenate(([-math.inf], self.poles, [math.inf]))
        bounds = []
        for seg in range(len(edges) - 1):
            lo = max(self.omega_min, _outside_window(edges[seg], window, +1))
            hi = min(self.omega_max, _outside_window(edges[seg + 1], window, -1))
            if lo < hi:
                bounds.append((seg, float(lo), float(hi)))
        return bounds

    def slope_fd(self) -> np.ndarray:
        """Finite-difference slope of each tracked branch along the grid."""
        fd = np.full_like(self.values, np.nan)
        for seg in np.unique(self.segments):
            idx = np.flatnonzero(self.segments == seg)
            if idx.size < 2:
                continue
            fd[idx] = np.gradient(self.values[idx], self.omega_grid[idx], axis=0)
        return fd

    def to_frame(self) -> pd.DataFrame:
        """Long-format table with columns ``omega, branch, omega_R, slope_fd``."""
        n, d = self.values.shape
        return pd.DataFrame(
            {
                "omega": np.repeat(self.omega_grid, d),
                "branch": np.tile(np.arange(d), n),
                "omega_R": self.values.reshape(-1),
                "slope_fd": self.slope_fd().reshape(-1),
            }
        )


def _outside_window(pole: float, window: float, side: int) -> float:
    """First frequency on ``side`` of ``pole`` that clears its window after rounding."""
    if not math.isfinite(pole):
        return pole
    offset = window * (1 + EDGE_SLACK) + 4 * float(np.spacing(abs(pole)))
    return pole + side * offset


def _eig(blocks: ProjectionBlocks, omega: float, window: float) -> tuple[np.ndarray, np.ndarray]:
    return scipy.linalg.eigh(renormalized_hamiltonian(blocks, omega, window))


def _match(previous: np.ndarray, current: np.ndarray) -> tuple[np.ndarray, float]:
    overlap = np.abs(previous.conj().T @ current)
    rows, cols = linear_sum_assignment(-overlap)
    return cols, float(overlap[rows, cols].min())


def _track_step(
    blocks: ProjectionBlocks,
    window: float,
    omega_a: float,
    vectors_a: np.ndarray,
    omega_b: float,
    vectors_b: np.ndarray,
    depth: int = 0,
) -> tuple[np.ndarray, float]:
    """Permutation taking sorted eigenvectors at ``omega_b`` into branch order.

    Below the overlap threshold the step is bisected, up to ``MAX_REFINEMENTS`` levels.
    """
    perm, quality = _match(vectors_a, vectors_b)
    if quality >= OVERLAP_THRESHOLD or depth >= MAX_REFINEMENTS:
        return perm, quality
    mid = (omega_a + omega_b) / 2
    _, vectors_mid = _eig(blocks, mid, window)
    perm_mid, q_first = _track_step(blocks, window, omega_a, vectors_a, mid, vectors_mid, depth + 1)
    perm_b, q_second = _track_step(
        blocks, window, mid, vectors_mid[:, perm_mid], omega_b, vectors_b, depth + 1
    )
    return perm_b, min(q_first, q_second)


def _align_phases(reference: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    phases = np.einsum("ik,ik->k", reference.conj(), vectors)
    magnitudes = np.abs(phases)
    factors = np.where(magnitudes > 0, phases.conj() / np.where(magnitudes > 0, magnitudes, 1), 1)
    return vectors * factors


def sample_grid(
    blocks: ProjectionBlocks, omega_min: float, omega_max: float, samples: int
) -> tuple[np.ndarray, float]:
    """Uniform grid with the pole windows removed."""
    if not (math.isfinite(omega_min) and math.isfinite(omega_max)) or omega_min >= omega_max:
        raise InvalidInputError(
            f"need finite omega_min < omega_max, got [{omega_min}, {omega_max}]"
        )
    if int(samples) != samples or samples < 2:
        raise InvalidInputError(f"samples must be an integer >= 2, got {samples!r}")
    window = pole_window(blocks)
    grid = np.linspace(omega_min, omega_max, int(samples))
    if blocks.poles.size:
        distance = np.abs(grid[:, None] - blocks.poles[None, :]).min(axis=1)
        grid = grid[distance > window]
    if grid.size == 0:
        raise EmptyGridError(
            "every sample lies inside a pole window",
            {"omega_min": omega_min, "omega_max": omega_max, "samples": samples},
        )
    return grid, window


def trace_curves(
    blocks: ProjectionBlocks, omega_min: float, omega_max: float, samples: int
) -> InteractionCurves:
    """Sample H_S + εM(ω) on a grid and follow each branch by eigenvector overlap.

    Args:
        blocks: Projection blocks (their ``epsilon`` is used)
        omega_min: Lower grid edge
        omega_max: Upper grid edge
        samples: Number of uniform samples before pole exclusion

    Returns:
        InteractionCurves; ``tracking_ok`` is False when some step stayed below
        the overlap threshold after refinement.
    """
    grid, window = sample_grid(blocks, omega_min, omega_max, samples)
    segments = np.searchsorted(blocks.poles, grid)
    d = blocks.soi_dim

    values = np.empty((grid.size, d))
    vectors = np.empty((grid.size, d, d), dtype=complex)
    slopes = np.empty((grid.size, d))
    tracking_ok = True

    for i, omega in enumerate(grid):
        vals, vecs = _eig(blocks, omega, window)
        if i > 0 and segments[i] == segments[i - 1]:
            perm, quality = _track_step(blocks, window, grid[i - 1], vectors[i - 1], omega, vecs)
            if quality < OVERLAP_THRESHOLD:
                tracking_ok = False
                logger.warning(
                    "Branch tracking overlap %.3f below %.1f between ω=%.6g and ω=%.6g",
                    quality,
                    OVERLAP_THRESHOLD,
                    grid[i - 1],
                    omega,
                )
            vals, vecs = vals[perm], _align_phases(vectors[i - 1], vecs[:, perm])
        values[i] = vals
        vectors[i] = vecs
        slopes[i] = [analytic_slope(blocks, omega, vecs[:, k], window) for k in range(d)]

    logger.debug(
        "Traced %d branches over %d samples in %d segment(s)",
        d,
        grid.size,
        len(np.unique(segments)),
    )
    return InteractionCurves(
        omega_grid=grid,
        values=values,
        vectors=vectors,
        slopes=slopes,
        segments=segments,
        poles=np.array(blocks.poles, copy=True),
        window=window,
        omega_min=float(omega_min),
        omega_max=float(omega_max),
        epsilon=blocks.epsilon,
        tracking_ok=tracking_ok,
    )
