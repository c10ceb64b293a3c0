"""Bath-state scans, parameter-plane heatmaps and their output."""

from .bath_scan import (
    DEFAULT_AXES,
    AxisScanSpec,
    BathScanSpec,
    PhiTrace,
    ScanOptimum,
    bath_phi_sweep,
    max_separability,
    scan_all_states,
    scan_axes,
)
from .heatmap import HEATMAP_COLUMNS, AxisSpec, GridSpec, SweepResult, heatmap
from .persist import OutputFormat, load_result, persist, write_frame, write_json

__all__ = [
    "DEFAULT_AXES",
    "HEATMAP_COLUMNS",
    "AxisScanSpec",
    "AxisSpec",
    "BathScanSpec",
    "GridSpec",
    "OutputFormat",
    "PhiTrace",
    "ScanOptimum",
    "SweepResult",
    "bath_phi_sweep",
    "heatmap",
    "load_result",
    "max_separability",
    "persist",
    "scan_all_states",
    "scan_axes",
    "write_frame",
    "write_json",
]
