"""Database models and utilities."""

from .db import get_db, init_db, load_heatmap, record_run, save_heatmap
from .models import HeatmapPoint, RunKind, SweepRun

__all__ = [
    "HeatmapPoint",
    "RunKind",
    "SweepRun",
    "get_db",
    "init_db",
    "load_heatmap",
    "record_run",
    "save_heatmap",
]
