"""Atomic CSV, JSON and SQLite output of sweep results and tables."""

import json
import logging
import os
import tempfile
from collections.abc import Callable
from contextlib import contextmanager
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd

from ..database.db import save_heatmap, sqlite_session
from ..errors import InvalidInputError
from .heatmap import HEATMAP_COLUMNS, STATE_NAMES, SweepResult

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    SQLITE = "sqlite"


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"cannot serialize {type(value).__name__}")


@contextmanager
def atomic_path(path: str | Path):
    """Yield a temporary sibling of ``path`` that replaces it on success."""
    path = Path(path)
    if not str(path):
        raise InvalidInputError("output path must be non-empty")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_text(path: str | Path, render: Callable[[], str]) -> None:
    with atomic_path(path) as tmp:
        tmp.write_text(render(), encoding="utf-8")


def write_json(data, path: str | Path) -> None:
    _write_text(path, lambda: json.dumps(data, indent=2, default=_to_builtin) + "\n")
    logger.info("Wrote %s", path)


def write_frame(frame: pd.DataFrame, path: str | Path, fmt: OutputFormat | str = "csv") -> None:
    """Write a table as CSV (12 significant digits) or as a JSON list of records."""
    fmt = OutputFormat(fmt)
    if fmt is OutputFormat.CSV:
        _write_text(path, lambda: frame.to_csv(index=False, float_format=FLOAT_FORMAT))
    elif fmt is OutputFormat.JSON:
        _write_text(
            path,
            lambda: json.dumps(frame.to_dict(orient="records"), indent=2, default=_to_builtin)
            + "\n",
        )
    else:
        raise InvalidInputError("tables are written as csv or json")
    logger.info("Wrote %d row(s) to %s", len(frame), path)


def result_to_dict(result: SweepResult) -> dict:
    frame = result.to_frame()
    return {
        "metadata": result.metadata,
        "columns": list(frame.columns),
        "rows": frame.to_numpy(dtype=float).tolist(),
        "arguments": result.arguments.tolist(),
    }


def result_from_dict(data: dict) -> SweepResult:
    try:
        frame = pd.DataFrame(data["rows"], columns=data["columns"])
        metadata = dict(data.get("metadata", {}))
        arguments = np.asarray(data.get("arguments", []), dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"malformed sweep result: {e}") from e
    if frame.empty:
        return SweepResult.empty(metadata)
    zmax = frame[[f"zmax_{name}" for name in STATE_NAMES]].to_numpy()
    if arguments.size == 0:
        arguments = np.full((len(frame), len(STATE_NAMES), 3), np.nan)
    return SweepResult(
        points=frame[["J0x", "V0x"]].to_numpy(),
        zmax=zmax,
        arguments=arguments.reshape(len(frame), len(STATE_NAMES), 3),
        metadata=metadata,
    )


def persist(result: SweepResult, path: str | Path, fmt: OutputFormat | str = "csv") -> None:
    """Write a heatmap in grid order.

    ``csv`` holds exactly the heatmap columns, ``json`` adds metadata and best
    rotations, ``sqlite`` stores a run with its points in a database file.
    """
    try:
        fmt = OutputFormat(fmt)
    except ValueError as e:
        raise InvalidInputError(f"unknown output format {fmt!r}") from e
    if fmt is OutputFormat.CSV:
        write_frame(result.to_frame()[HEATMAP_COLUMNS], path, fmt)
    elif fmt is OutputFormat.JSON:
        write_json(result_to_dict(result), path)
    else:
        with atomic_path(path) as tmp:
            with sqlite_session(tmp) as session:
                save_heatmap(result, session=session)
        logger.info("Stored %d point(s) in %s", len(result), path)


def load_result(path: str | Path) -> SweepResult:
    """Read a heatmap written by ``persist`` as csv or json."""
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"no such result file: {path}")
    if path.suffix == ".json":
        return result_from_dict(json.loads(path.read_text(encoding="utf-8")))
    frame = pd.read_csv(path)
    return result_from_dict(
        {"columns": list(frame.columns), "rows": frame.to_numpy(dtype=float).tolist()}
    )
