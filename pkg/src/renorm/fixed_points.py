"""Fixed points ω_R(ω) = ω of the nonlinear eigenproblem and their separability."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from ..errors import (
    ConvergenceError,
    InvalidInputError,
    NoFixedPointError,
    NumericConsistencyError,
    PoleProximityError,
)
from ..hilbert.basis import EigenSystem, ManyBodyOperator, diagonalize
from ..projection.bath import BathState
from ..projection.blocks import ProjectionBlocks, reassemble
from .curves import InteractionCurves
from .schur import analytic_slope, pole_window, renormalized_hamiltonian, resolvent_solve

logger = logging.getLogger(__name__)

ROOT_RTOL = 1e-11
RESIDUAL_RTOL = 1e-9
MAX_BISECTIONS = 80
MAX_WINDOW_SHRINKS = 3
WINDOW_SHRINK_FACTOR = 10.0
FD_STEP_RTOL = 1e-6
FD_RTOL = 1e-5
FD_ATOL = 1e-7
CONTINUATION_STEPS = 8
CONTINUATION_SPAN = 1e-3
TIE_TOL = 1e-9
ACTIVE_POLE_RTOL = 1e-12
WEIGHT_TOL = 1e-12
DEGENERATE_ROOT_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class FixedPointRecord:
    """One universe eigenvalue recovered from the renormalized Hamiltonian.

    ``eigenvector`` is the normalized eigenvector |R⟩ of H^R(ω_λ) in the SOI
    coordinates of the static block.
    """

    omega_lambda: float
    branch_id: int
    segment: int
    slope: float
    Z: float
    z: float
    W: float
    static_partner: int
    residual: float
    eigenvector: np.ndarray = field(repr=False)
    slope_fd: float | None = None

    def to_dict(self) -> dict:
        return {
            "omega_lambda": self.omega_lambda,
            "branch_id": self.branch_id,
            "segment": self.segment,
            "slope": self.slope,
            "slope_fd": self.slope_fd,
            "Z": self.Z,
            "z": self.z,
            "W": self.W,
            "static_partner": self.static_partner,
            "residual": self.residual,
        }


@dataclass(frozen=True, eq=False)
class TransformPair:
    """Static eigenvector paired with the renormalized eigenvector it maps to."""

    static_index: int
    omega_lambda: float
    static_vector: np.ndarray = field(repr=False)
    renormalized_vector: np.ndarray = field(repr=False)
    overlap: complex


def _branch_value(blocks: ProjectionBlocks, omega: float, branch: int, window: float) -> float:
    return float(scipy.linalg.eigvalsh(renormalized_hamiltonian(blocks, omega, window))[branch])


def _bisect(
    blocks: ProjectionBlocks, branch: int, lo: float, hi: float, window: float, tol: float
) -> tuple[float, float]:
    """Root of g(ω) = ω_R(ω) − ω on [lo, hi] with g(lo) > 0 > g(hi)."""
    omega = 0.5 * (lo + hi)
    g = _branch_value(blocks, omega, branch, window) - omega
    for _ in range(MAX_BISECTIONS):
        if abs(g) <= tol:
            break
        if g > 0:
            lo = omega
        else:
            hi = omega
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        omega = mid
        g = _branch_value(blocks, omega, branch, window) - omega
    return omega, abs(g)


def _active_poles(blocks: ProjectionBlocks) -> np.ndarray:
    """Mask of poles whose rest eigenvector couples to the SOI."""
    if blocks.rest_dim == 0 or blocks.epsilon == 0:
        return np.zeros(blocks.rest_dim, dtype=bool)
    _, rest_vectors = scipy.linalg.eigh(blocks.H_R)
    residues = np.linalg.norm(blocks.C @ rest_vectors, axis=0) ** 2
    scale = max(float(np.linalg.norm(blocks.C)) ** 2, 1e-300)
    return residues > ACTIVE_POLE_RTOL * scale


def _segment_roots(
    blocks: ProjectionBlocks,
    curves: InteractionCurves,
    window: float,
    tol: float,
) -> tuple[list[tuple[float, float, int, int]], float | None, float | None]:
    """Bracketed roots per sorted branch and segment.

    Returns the roots and, when a root is hidden inside a pole window, the
    offending pole and the boundary frequency that exposed it.
    """
    poles = blocks.poles
    active = _active_poles(blocks)
    roots = []
    hidden_pole = hidden_omega = None
    for seg, lo, hi in curves.segment_bounds(window):
        g_lo = scipy.linalg.eigvalsh(renormalized_hamiltonian(blocks, lo, window)) - lo
        g_hi = scipy.linalg.eigvalsh(renormalized_hamiltonian(blocks, hi, window)) - hi
        for k in range(blocks.soi_dim):
            if abs(g_lo[k]) <= tol:
                roots.append((lo, abs(g_lo[k]), k, seg))
            elif abs(g_hi[k]) <= tol:
                roots.append((hi, abs(g_hi[k]), k, seg))
            elif g_lo[k] > 0 > g_hi[k]:
                omega, residual = _bisect(blocks, k, lo, hi, window, tol)
                roots.append((omega, residual, k, seg))

        # A coupled pole drives the top branch to +inf on its right and the
        # bottom branch to -inf on its left.
        left_pole, right_pole = seg - 1, seg
        if left_pole >= 0 and active[left_pole] and lo > curves.omega_min and g_lo[-1] < -tol:
            hidden_pole, hidden_omega = float(poles[left_pole]), lo
        right_open = right_pole < poles.size and hi < curves.omega_max
        if right_open and active[right_pole] and g_hi[0] > tol:
            hidden_pole, hidden_omega = float(poles[right_pole]), hi
    return roots, hidden_pole, hidden_omega


def _fd_step(blocks: ProjectionBlocks, omega: float, window: float) -> float:
    h = FD_STEP_RTOL * blocks.spectral_range
    if blocks.poles.size:
        distance = float(np.abs(omega - blocks.poles).min()) - window
        h = min(h, 1e-3 * distance)
    return h


def finite_difference_slope(
    blocks: ProjectionBlocks, omega: float, eigvec: np.ndarray, window: float | None = None
) -> float | None:
    """Central difference along the branch that carries ``eigvec``; None next to a pole.

    On each side the branch is the eigenvector with the largest overlap, so
    crossing branches are followed through the crossing rather than by rank.
    """
    window = pole_window(blocks) if window is None else window
    h = _fd_step(blocks, omega, window)
    if h <= 0:
        return None
    sides = []
    for shifted in (omega + h, omega - h):
        values, vectors = scipy.linalg.eigh(renormalized_hamiltonian(blocks, shifted, window))
        sides.append(float(values[np.argmax(np.abs(vectors.conj().T @ eigvec))]))
    return (sides[0] - sides[1]) / (2 * h)


def _group_degenerate(
    roots: list[tuple[float, float, int, int]], tol: float
) -> list[list[int]]:
    """Indices of sorted roots sharing a segment and a frequency within ``tol``."""
    groups: list[list[int]] = []
    for i, (omega, _, _, seg) in enumerate(roots):
        if groups:
            last = roots[groups[-1][-1]]
            if last[3] == seg and omega - last[0] <= tol:
                groups[-1].append(i)
                continue
        groups.append([i])
    return groups


def _degenerate_eigenvectors(
    blocks: ProjectionBlocks, omega: float, count: int, tol: float
) -> np.ndarray:
    """SOI parts |R⟩ of the universe eigenvectors behind ``count`` coincident fixed points.

    They come from ``blocks.universe``, so each record matches
    ``separability_direct`` for the same eigenstate. Cluster vectors with no
    SOI weight are not fixed points; when they occur the cluster is first
    rotated so that its SOI weight sits in ``count`` columns.
    """
    universe = blocks.universe
    cluster = np.flatnonzero(np.abs(universe.values - omega) <= tol)
    if cluster.size < count:
        cluster = np.sort(np.argsort(np.abs(universe.values - omega))[:count])
    top = universe.vectors[: blocks.soi_dim, cluster]
    norms = np.linalg.norm(top, axis=0)
    if cluster.size != count or norms.min() <= WEIGHT_TOL:
        _, _, vh = scipy.linalg.svd(top)
        top = (top @ vh.conj().T)[:, :count]
        norms = np.linalg.norm(top, axis=0)
    return top / norms


def _checked_slope(
    blocks: ProjectionBlocks, omega: float, eigvec: np.ndarray, window: float | None, check: bool
) -> tuple[float, float | None]:
    eigvec = np.asarray(eigvec, dtype=complex)
    eigvec = eigvec / np.linalg.norm(eigvec)
    slope = analytic_slope(blocks, omega, eigvec, window)
    if not check or slope == 0.0:
        return slope, None
    fd = finite_difference_slope(blocks, omega, eigvec, window)
    if fd is not None and not np.isclose(fd, slope, rtol=FD_RTOL, atol=FD_ATOL):
        raise NumericConsistencyError(
            "finite-difference slope disagrees with resolvent slope",
            {"omega": omega, "analytic": slope, "finite_difference": fd},
        )
    return slope, fd


def slope_at(
    blocks: ProjectionBlocks,
    omega_lambda: float,
    eigvec: np.ndarray,
    window: float | None = None,
    check: bool = True,
) -> float:
    """Analytic slope dω_R/dω at a fixed point, cross-checked by central differences.

    Raises:
        PoleProximityError: ``omega_lambda`` inside a pole window
        NumericConsistencyError: the finite difference disagrees beyond tolerance
    """
    return _checked_slope(blocks, omega_lambda, eigvec, window, check)[0]


def separability_from_eigensystem(
    operator: ManyBodyOperator, eigen: EigenSystem, bath: BathState
) -> np.ndarray:
    """Z for every eigenstate of ``eigen`` at once."""
    if bath.dimension != operator.basis.bath_dim:
        raise InvalidInputError(
            f"bath state has dimension {bath.dimension}, basis bath dimension is "
            f"{operator.basis.bath_dim}"
        )
    coefficients = operator.basis.as_matrix(eigen.vectors)
    amplitudes = np.einsum("b,bsn->sn", bath.amplitudes.conj(), coefficients)
    return np.sum(np.abs(amplitudes) ** 2, axis=0)


def separability_direct(
    H: ManyBodyOperator, bath: BathState, eig_index: int, eigen: EigenSystem | None = None
) -> float:
    """‖(|bath⟩⟨bath| ⊗ I) |λ⟩‖² for the eigenstate ``eig_index`` of ``H``."""
    eigen = diagonalize(H) if eigen is None else eigen
    eigen.vector(eig_index)
    return float(separability_from_eigensystem(H, eigen, bath)[eig_index])


def similarity(blocks: ProjectionBlocks, fixed_point: FixedPointRecord, static_index: int) -> float:
    """z = |⟨S|R⟩|² for static eigenstate ``static_index``."""
    static = blocks.static.vector(static_index)
    return float(abs(np.vdot(static, fixed_point.eigenvector)) ** 2)


def weight_factor(Z: float, z: float) -> float:
    """W = Z·z."""
    for name, value in (("Z", Z), ("z", z)):
        if not (-WEIGHT_TOL <= value <= 1 + WEIGHT_TOL):
            raise InvalidInputError(f"{name} must lie in [0, 1], got {value}")
    return float(min(max(Z, 0.0), 1.0) * min(max(z, 0.0), 1.0))


def universe_vector(
    blocks: ProjectionBlocks, omega_lambda: float, eigvec: np.ndarray, window: float | None = None
) -> np.ndarray:
    """Rotated-frame universe eigenvector rebuilt from |R⟩ at a fixed point.

    The rest component is √ε (ω_λ − H_R)⁻¹ C† |R⟩; the top-block weight of
    the normalized result equals Z = 1/(1 − slope).
    """
    eigvec = np.asarray(eigvec, dtype=complex)
    if blocks.epsilon == 0 or blocks.rest_dim == 0:
        rest = np.zeros(blocks.rest_dim, dtype=complex)
    else:
        x = resolvent_solve(blocks, omega_lambda, blocks.C.conj().T @ eigvec, window)
        rest = math.sqrt(blocks.epsilon) * x
    vector = np.concatenate([eigvec, rest])
    return vector / np.linalg.norm(vector)


def static_partners(
    blocks: ProjectionBlocks, omegas: list[float], renormalized: list[np.ndarray]
) -> list[int]:
    """Static eigenstate each fixed point continues to as ε is switched off.

    Eigenvectors are followed over geometric ε steps down to ``ε·1e-3`` with
    assignment on overlaps; the partner is the static state with the largest
    overlap at the smallest ε, ties going to the larger overlap at the original ε.
    """
    d = blocks.soi_dim
    static_vectors = blocks.static.vectors
    current = np.column_stack(
        [universe_vector(blocks, w, r) for w, r in zip(omegas, renormalized)]
    )

    if blocks.epsilon > 0:
        exponents = np.arange(CONTINUATION_STEPS) / (CONTINUATION_STEPS - 1)
        steps = blocks.epsilon * CONTINUATION_SPAN**exponents
        for eps in steps[1:]:
            system = diagonalize(reassemble(blocks, float(eps)))
            overlap = np.abs(current.conj().T @ system.vectors)
            _, cols = linear_sum_assignment(-overlap)
            current = system.vectors[:, cols]

    top = current[:d, :]
    norms = np.linalg.norm(top, axis=0)
    top = top / np.where(norms > 0, norms, 1.0)
    final = np.abs(static_vectors.conj().T @ top) ** 2
    original = np.abs(static_vectors.conj().T @ np.column_stack(renormalized)) ** 2

    partners = []
    for j in range(len(omegas)):
        best = final[:, j].max()
        candidates = np.flatnonzero(final[:, j] >= best - TIE_TOL)
        partners.append(int(candidates[np.argmax(original[candidates, j])]))
    return partners


def find_fixed_points(
    curves: InteractionCurves,
    blocks: ProjectionBlocks,
    static_index: int | None = None,
    check_slope: bool = True,
) -> list[FixedPointRecord]:
    """Locate every crossing ω_R(ω) = ω inside the sampled range.

    Args:
        curves: Traced curves fixing the range and pole windows
        blocks: Projection blocks the curves were traced from
        static_index: Static eigenstate used for ``z`` and ``W``; default is
            each fixed point's ε → 0 continuation partner
        check_slope: Cross-check analytic slopes by finite differences

    Returns:
        Records in ascending ``omega_lambda``.

    Raises:
        NoFixedPointError: No crossing inside the range
        PoleProximityError: A fixed point stays hidden in a shrunken pole window
    """
    if curves.n_samples == 0:
        raise NoFixedPointError("interaction curves are empty")
    if static_index is not None:
        blocks.static.vector(static_index)

    scale = blocks.spectral_range
    tol = ROOT_RTOL * scale
    window = curves.window
    for attempt in range(MAX_WINDOW_SHRINKS + 1):
        roots, hidden_pole, hidden_omega = _segment_roots(blocks, curves, window, tol)
        if hidden_pole is None:
            break
        if attempt == MAX_WINDOW_SHRINKS:
            raise PoleProximityError(hidden_omega, hidden_pole, window)
        logger.debug(
            "Fixed point hidden near pole %.6g; shrinking window to %.3e",
            hidden_pole,
            window / WINDOW_SHRINK_FACTOR,
        )
        window /= WINDOW_SHRINK_FACTOR

    if not roots:
        raise NoFixedPointError(
            "no sign change of ω_R(ω) − ω in the sampled range",
            {"omega_min": curves.omega_min, "omega_max": curves.omega_max},
        )
    roots.sort(key=lambda r: r[0])

    for omega, residual, _, _ in roots:
        if residual > RESIDUAL_RTOL * scale:
            raise ConvergenceError(
                "bisection stopped above the residual tolerance",
                {"omega": omega, "residual": residual, "scale": scale},
            )

    eigenvectors: list[np.ndarray] = [None] * len(roots)
    degenerate: set[int] = set()
    for group in _group_degenerate(roots, DEGENERATE_ROOT_RTOL * scale):
        omega = roots[group[0]][0]
        if len(group) == 1:
            _, vectors = scipy.linalg.eigh(renormalized_hamiltonian(blocks, omega, window))
            eigenvectors[group[0]] = vectors[:, roots[group[0]][2]]
            continue
        omega = float(np.mean([roots[i][0] for i in group]))
        logger.warning(
            "%d fixed points coincide at omega=%.10g; taking universe eigenvectors",
            len(group),
            omega,
        )
        vectors = _degenerate_eigenvectors(blocks, omega, len(group), DEGENERATE_ROOT_RTOL * scale)
        degenerate.update(group)
        for column, i in enumerate(group):
            eigenvectors[i] = vectors[:, column]

    omegas = [r[0] for r in roots]
    partners = (
        [static_index] * len(roots)
        if static_index is not None
        else static_partners(blocks, omegas, eigenvectors)
    )

    records = []
    rows = enumerate(zip(roots, eigenvectors, partners))
    for i, ((omega, residual, branch, seg), vector, partner) in rows:
        # degenerate members mix crossing branches
        check = check_slope and i not in degenerate
        slope, fd = _checked_slope(blocks, omega, vector, window, check)
        Z = 1.0 / (1.0 - slope)
        z = float(abs(np.vdot(blocks.static.vector(partner), vector)) ** 2)
        records.append(
            FixedPointRecord(
                omega_lambda=float(omega),
                branch_id=int(branch),
                segment=int(seg),
                slope=slope,
                Z=Z,
                z=z,
                W=weight_factor(Z, z),
                static_partner=int(partner),
                residual=float(residual),
                eigenvector=vector,
                slope_fd=fd,
            )
        )

    for record in records:
        check_record(record, scale)

    logger.info(
        "Found %d fixed point(s) in [%.6g, %.6g] at epsilon=%.3g",
        len(records),
        curves.omega_min,
        curves.omega_max,
        blocks.epsilon,
    )
    return records


def linearized_shift(blocks: ProjectionBlocks, record: FixedPointRecord) -> float:
    """First-order estimate of ω_λ − ω_S, namely Z·(ω_R(ω_S) − ω_S).

    ω_R(ω_S) is taken on the branch of H^R(ω_S) that overlaps the static partner most.
    """
    omega_s = float(blocks.static.values[record.static_partner])
    values, vectors = scipy.linalg.eigh(renormalized_hamiltonian(blocks, omega_s))
    branch = int(np.argmax(np.abs(vectors.conj().T @ blocks.static.vector(record.static_partner))))
    return record.Z * (float(values[branch]) - omega_s)


def transform_pairs(
    blocks: ProjectionBlocks, records: list[FixedPointRecord]
) -> list[TransformPair]:
    """Static → renormalized eigenvector pairs, one per fixed point."""
    pairs = []
    for record in records:
        static = blocks.static.vector(record.static_partner)
        pairs.append(
            TransformPair(
                static_index=record.static_partner,
                omega_lambda=record.omega_lambda,
                static_vector=np.array(static),
                renormalized_vector=np.array(record.eigenvector),
                overlap=complex(np.vdot(static, record.eigenvector)),
            )
        )
    return pairs


def exact_separability(blocks: ProjectionBlocks, omega_lambda: float) -> float:
    """Top-block weight of the universe eigenvector nearest ``omega_lambda``."""
    universe = blocks.universe
    index = int(np.argmin(np.abs(universe.values - omega_lambda)))
    top = universe.vectors[: blocks.soi_dim, index]
    return float(np.real(np.vdot(top, top)))


def check_record(record: FixedPointRecord, scale: float) -> None:
    """Assert the internal invariants of a fixed-point record."""
    if record.residual > RESIDUAL_RTOL * scale:
        raise NumericConsistencyError("fixed-point residual too large", record.to_dict())
    if not math.isclose(record.Z, 1.0 / (1.0 - record.slope), rel_tol=1e-10):
        raise NumericConsistencyError("Z inconsistent with slope", record.to_dict())
    if not (0.0 < record.Z <= 1.0 and 0.0 <= record.W <= record.Z + WEIGHT_TOL):
        raise NumericConsistencyError("record weights outside their ranges", record.to_dict())
