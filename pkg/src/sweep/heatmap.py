"""Maximum separability over the (J0x, V0x) plane of the two-site model."""

import logging
import os
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np
import pandas as pd

from ..errors import InvalidInputError
from ..hilbert.two_site import TwoSiteParams, build_two_site
from .bath_scan import AxisScanSpec, BathScanSpec, scan_all_states, scan_axes

logger = logging.getLogger(__name__)

STATE_NAMES = ("gs", "e1", "e2", "e3")
HEATMAP_COLUMNS = [
    "J0x",
    "V0x",
    "zmax_gs",
    "zmax_e1",
    "zmax_e2",
    "zmax_e3",
    "zmax_mean",
    "zmax_std",
]


@dataclass(frozen=True)
class AxisSpec:
    """``steps`` evenly spaced values of one parameter, both ends included."""

    name: str
    minimum: float
    maximum: float
    steps: int

    def __post_init__(self):
        if self.name not in ("J0x", "V0x"):
            raise InvalidInputError(f"heatmap axes are J0x and V0x, got {self.name!r}")
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 1:
            raise InvalidInputError(f"{self.name} steps must be a positive integer")
        if not (np.isfinite(self.minimum) and np.isfinite(self.maximum)):
            raise InvalidInputError(f"{self.name} bounds must be finite")
        if self.steps == 1 and self.minimum != self.maximum:
            raise InvalidInputError(f"{self.name} needs steps >= 2 for a non-empty range")
        if self.minimum > self.maximum:
            raise InvalidInputError(f"{self.name} minimum exceeds maximum")

    def values(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.steps)

    def to_list(self) -> list:
        return [self.minimum, self.maximum, self.steps]


@dataclass(frozen=True)
class GridSpec:
    """Parameter plane plus the bath scan performed at every point.

    ``bath_scan`` is either the full-sphere search or an angle-only scan about
    fixed axes.
    """

    J0x: AxisSpec
    V0x: AxisSpec
    bath_scan: BathScanSpec | AxisScanSpec = field(default_factory=BathScanSpec)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.J0x.steps, self.V0x.steps)

    def points(self) -> list[tuple[float, float]]:
        """Grid points in row-major order, J0x outer."""
        return [(float(j), float(v)) for j in self.J0x.values() for v in self.V0x.values()]

    def to_dict(self) -> dict:
        return {
            "grid": {"J0x": self.J0x.to_list(), "V0x": self.V0x.to_list()},
            "bath_scan": self.bath_scan.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Per-point maximum Z of each eigenstate with its mean and spread.

    ``zmax[i, n]`` is eigenstate ``n`` at ``points[i]``; ``arguments[i, n]``
    holds the (polar, azimuth, angle) of the best rotation.
    """

    points: np.ndarray
    zmax: np.ndarray = field(repr=False)
    arguments: np.ndarray = field(repr=False)
    metadata: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, metadata: dict | None = None) -> "SweepResult":
        return cls(
            points=np.empty((0, 2)),
            zmax=np.empty((0, len(STATE_NAMES))),
            arguments=np.empty((0, len(STATE_NAMES), 3)),
            metadata=metadata or {},
        )

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def mean(self) -> np.ndarray:
        return self.zmax.mean(axis=1) if len(self) else np.empty(0)

    @property
    def std(self) -> np.ndarray:
        """Population standard deviation across eigenstates."""
        return self.zmax.std(axis=1) if len(self) else np.empty(0)

    def grid(self, column: str) -> np.ndarray:
        """One column reshaped onto the (J0x, V0x) grid."""
        shape = self.metadata.get("shape")
        if shape is None:
            raise InvalidInputError("result carries no grid shape")
        return self.to_frame()[column].to_numpy().reshape(shape)

    def to_frame(self) -> pd.DataFrame:
        """Heatmap table in grid order."""
        if not len(self):
            return pd.DataFrame({name: pd.Series(dtype=float) for name in HEATMAP_COLUMNS})
        data = {"J0x": self.points[:, 0], "V0x": self.points[:, 1]}
        for n, name in enumerate(STATE_NAMES[: self.zmax.shape[1]]):
            data[f"zmax_{name}"] = self.zmax[:, n]
        data["zmax_mean"] = self.mean
        data["zmax_std"] = self.std
        return pd.DataFrame(data, columns=HEATMAP_COLUMNS)


def _scan_point(
    task: tuple[TwoSiteParams, BathScanSpec | AxisScanSpec],
) -> tuple[np.ndarray, np.ndarray]:
    params, spec = task
    H = build_two_site(params)
    optima = scan_axes(H, spec) if isinstance(spec, AxisScanSpec) else scan_all_states(H, spec)
    values = np.array([o.Z_max for o in optima])
    arguments = np.array([[o.theta, o.azimuth, o.rotation.angle] for o in optima])
    return values, arguments


def default_workers() -> int:
    return os.cpu_count() or 1


def heatmap(base_params: TwoSiteParams, grid: GridSpec, workers: int | None = None) -> SweepResult:
    """Maximum separability of all four eigenstates at every (J0x, V0x).

    Points are independent; with more than one worker they run on a process
    pool and are gathered back in grid order, so the result does not depend
    on ``workers``.
    """
    workers = default_workers() if workers is None else workers
    if not isinstance(workers, (int, np.integer)) or workers < 1:
        raise InvalidInputError(f"workers must be a positive integer, got {workers!r}")

    points = grid.points()
    tasks = [(base_params.replace(J0x=j, V0x=v), grid.bath_scan) for j, v in points]
    logger.info(
        "Scanning %d grid points (resolution %s) with %d worker(s)",
        len(tasks),
        grid.bath_scan.resolution,
        workers,
    )
    if workers == 1 or len(tasks) < 2:
        outcomes = list(map(_scan_point, tasks))
    else:
        with Pool(processes=min(workers, len(tasks))) as pool:
            outcomes = pool.map(_scan_point, tasks)

    metadata = {
        "model": base_params.to_dict(),
        **grid.to_dict(),
        "shape": list(grid.shape),
    }
    result = SweepResult(
        points=np.array(points, dtype=float).reshape(-1, 2),
        zmax=np.array([o[0] for o in outcomes]),
        arguments=np.array([o[1] for o in outcomes]),
        metadata=metadata,
    )
    logger.info(
        "Heatmap finished: mean Z_max %.6f over %d points", float(result.mean.mean()), len(result)
    )
    return result
