"""Environment settings and JSON configuration files."""

import json
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .hilbert.basis import ManyBodyOperator
from .hilbert.two_site import TWO_SITE_BASIS, TwoSiteParams, build_two_site
from .projection.bath import (
    BathState,
    BlochRotation,
    canonical_bath_state,
    rotate_bath_state,
)
from .sweep.bath_scan import AxisScanSpec, BathScanSpec
from .sweep.heatmap import AxisSpec, GridSpec
from .weakcoupling.siam import WidthConvention

logger = logging.getLogger(__name__)

# Shorthands for the canonical bath states of the two-site model
BATH_SHORTHANDS = {"0up": 0, "xup": 1}


def get_workers() -> int:
    """Default worker count for sweeps from environment or CPU count."""
    value = os.getenv("SEPARABILITY_WORKERS")
    if not value:
        return os.cpu_count() or 1
    try:
        workers = int(value)
    except ValueError as e:
        raise InvalidInputError(f"SEPARABILITY_WORKERS must be an integer, got {value!r}") from e
    if workers < 1:
        raise InvalidInputError(f"SEPARABILITY_WORKERS must be positive, got {workers}")
    return workers


def get_log_level() -> int:
    """Root log level from environment or INFO."""
    name = os.getenv("SEPARABILITY_LOG_LEVEL", "INFO").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise InvalidInputError(f"unknown SEPARABILITY_LOG_LEVEL {name!r}")
    return level


def load_json(path: str | Path) -> dict:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise InvalidInputError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InvalidInputError(f"{path} must hold a JSON object")
    return data


def _check_number(value, key: str) -> float:
    if value is None:
        raise InvalidInputError(f"missing required field {key!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidInputError(f"field {key!r} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise InvalidInputError(f"field {key!r} must be finite")
    return float(value)


def _check_integer(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidInputError(f"field {key!r} must be an integer, got {value!r}")
    return value


def _number(data: dict, key: str, default: float | None = None) -> float:
    return _check_number(data.get(key, default), key)


def _integer(data: dict, key: str, default: int | None = None) -> int:
    return _check_integer(data.get(key, default), key)


def _flag(data: dict, key: str, default: bool) -> bool:
    value = data.get(key, default)
    if not isinstance(value, bool):
        raise InvalidInputError(f"field {key!r} must be true or false, got {value!r}")
    return value


def _pair(value, key: str) -> list:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise InvalidInputError(f"field {key!r} must be a two-element list, got {value!r}")
    return list(value)


def parse_two_site(data: dict) -> TwoSiteParams:
    """Two-site parameters; ``omega_d`` is ``[re, im]``."""
    re, im = _pair(data.get("omega_d"), "omega_d")
    return TwoSiteParams(
        omega0=_number(data, "omega0"),
        omega_d=complex(_check_number(re, "omega_d"), _check_number(im, "omega_d")),
        V00=_number(data, "V00"),
        V0x=_number(data, "V0x"),
        Vxx=_number(data, "Vxx"),
        J0x=_number(data, "J0x"),
    )


def parse_hamiltonian(data: dict) -> ManyBodyOperator:
    """Dense Hamiltonian from ``soi_dim``, ``bath_dim``, ``matrix_re`` and ``matrix_im``."""
    try:
        real = np.asarray(data["matrix_re"], dtype=float)
        imag = np.asarray(data.get("matrix_im", np.zeros_like(real)), dtype=float)
    except KeyError as e:
        raise InvalidInputError("Hamiltonian file needs 'matrix_re'") from e
    except (TypeError, ValueError) as e:
        raise InvalidInputError(f"malformed Hamiltonian matrix: {e}") from e
    if real.shape != imag.shape:
        raise InvalidInputError(f"matrix_re {real.shape} and matrix_im {imag.shape} differ")
    return ManyBodyOperator.from_matrix(
        real + 1j * imag,
        soi_dim=_integer(data, "soi_dim"),
        bath_dim=_integer(data, "bath_dim"),
    )


def load_operator(path: str | Path) -> tuple[ManyBodyOperator, TwoSiteParams | None]:
    """Universe Hamiltonian from a Hamiltonian file or a two-site (or heatmap) config."""
    data = load_json(path)
    if "matrix_re" in data:
        return parse_hamiltonian(data), None
    params = parse_two_site(data.get("model", data))
    return build_two_site(params), params


def parse_bath(spec: str, bath_dim: int = TWO_SITE_BASIS.bath_dim) -> BathState:
    """Bath state from a shorthand (``0up``, ``xup``), a level index or a JSON file.

    The file holds either ``amplitudes_re``/``amplitudes_im`` or a rotation
    ``axis``, ``phi``, ``base_index`` and ``pair``.
    """
    spec = spec.strip()
    if spec in BATH_SHORTHANDS:
        return canonical_bath_state(bath_dim, BATH_SHORTHANDS[spec])
    if spec.isdigit():
        return canonical_bath_state(bath_dim, int(spec))

    data = load_json(spec)
    if "amplitudes_re" in data:
        real = np.asarray(data["amplitudes_re"], dtype=float)
        imag = np.asarray(data.get("amplitudes_im", np.zeros_like(real)), dtype=float)
        if real.shape != imag.shape or real.shape != (bath_dim,):
            raise InvalidInputError(f"bath amplitudes must have length {bath_dim}")
        return BathState.normalized(real + 1j * imag)
    if "axis" in data:
        base = canonical_bath_state(bath_dim, _integer(data, "base_index", 0))
        rotation = BlochRotation(data["axis"], _number(data, "phi"))
        return rotate_bath_state(base, rotation, tuple(_pair(data.get("pair", [0, 1]), "pair")))
    raise InvalidInputError(f"{spec} is neither a bath shorthand nor a bath-state file")


def _axis(grid: dict, name: str) -> AxisSpec:
    minimum, maximum, steps = _triple(grid.get(name), name)
    return AxisSpec(
        name,
        _check_number(minimum, name),
        _check_number(maximum, name),
        _check_integer(steps, name),
    )


def _triple(value, key: str) -> list:
    if not (isinstance(value, (list, tuple)) and len(value) == 3):
        raise InvalidInputError(f"grid field {key!r} must be [min, max, steps], got {value!r}")
    return list(value)


def parse_heatmap(data: dict) -> tuple[TwoSiteParams, GridSpec, int | None]:
    """Model, grid with its bath scan, and the optional worker count."""
    if "model" not in data or "grid" not in data:
        raise InvalidInputError("heatmap config needs 'model' and 'grid'")
    scan = data.get("bath_scan", {})
    if "axes" in scan:
        if not isinstance(scan["axes"], list):
            raise InvalidInputError("bath_scan axes must be a list of [x, y, z]")
        bath_scan = AxisScanSpec(
            axes=tuple(
                tuple(_check_number(a, "axes") for a in axis) for axis in scan["axes"]
            ),
            phi_steps=_integer(scan, "phi_steps", 129),
        )
    else:
        cap = scan.get("polar_cap")
        bath_scan = BathScanSpec(
            n_polar=_integer(scan, "n_polar", 16),
            n_azimuth=_integer(scan, "n_azimuth", 32),
            n_angle=_integer(scan, "n_angle", 64),
            refine_rounds=_integer(scan, "refine_rounds", 2),
            polar_cap=None if cap is None else _number(scan, "polar_cap"),
        )
    grid = GridSpec(_axis(data["grid"], "J0x"), _axis(data["grid"], "V0x"), bath_scan)
    workers = data.get("workers")
    if workers is not None:
        workers = _integer(data, "workers")
    return parse_two_site(data["model"]), grid, workers


@dataclass(frozen=True)
class SIAMConfig:
    omega_s: float
    delta0: float
    bandwidth: float
    modes: int
    width_convention: WidthConvention = WidthConvention.GOLDEN_RULE_PI
    edge_compensation: bool = True


def parse_siam(data: dict) -> SIAMConfig:
    try:
        convention = WidthConvention(data.get("width_convention", "golden_rule_pi"))
    except ValueError as e:
        raise InvalidInputError(f"unknown width convention {data.get('width_convention')!r}") from e
    config = SIAMConfig(
        omega_s=_number(data, "omega_s"),
        delta0=_number(data, "delta0"),
        bandwidth=_number(data, "bandwidth"),
        modes=_integer(data, "modes"),
        width_convention=convention,
        edge_compensation=_flag(data, "edge_compensation", True),
    )
    if config.delta0 <= 0 or config.bandwidth <= 0 or config.modes < 1:
        raise InvalidInputError("SIAM delta0 and bandwidth must be positive, modes at least 1")
    return config


@dataclass(frozen=True)
class GreensConfig:
    omega_s: float
    delta0: float
    t_max: float
    t_steps: int

    def t_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.t_steps)


def parse_greens(data: dict) -> GreensConfig:
    config = GreensConfig(
        omega_s=_number(data, "omega_s"),
        delta0=_number(data, "delta0"),
        t_max=_number(data, "t_max"),
        t_steps=_integer(data, "t_steps"),
    )
    if config.delta0 < 0 or config.t_max <= 0 or config.t_steps < 2:
        raise InvalidInputError("Green's config needs delta0 >= 0, t_max > 0 and t_steps >= 2")
    return config
