"""Database connection and utilities."""

import json
import logging
import os
from collections.abc import Generator
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path

import pandas as pd
from sqlalchemy import create_engine
from sqlalchemy.orm import Session, sessionmaker

from ..errors import InvalidInputError
from .models import Base, HeatmapPoint, RunKind, SweepRun

logger = logging.getLogger(__name__)

# Default database path
DEFAULT_DB_PATH = Path(__file__).parent.parent.parent / "runs.db"

POINT_COLUMNS = [
    "J0x",
    "V0x",
    "zmax_gs",
    "zmax_e1",
    "zmax_e2",
    "zmax_e3",
    "zmax_mean",
    "zmax_std",
]


def get_database_url() -> str:
    """Get database URL from environment or use default SQLite."""
    return os.getenv("DATABASE_URL", f"sqlite:///{DEFAULT_DB_PATH}")


# Create engine lazily
_engine = None
_SessionLocal = None


def get_engine():
    """Get or create the database engine."""
    global _engine
    if _engine is None:
        _engine = create_engine(
            get_database_url(),
            echo=os.getenv("DEBUG", "").lower() == "true",
        )
    return _engine


def get_session_factory():
    """Get or create the session factory."""
    global _SessionLocal
    if _SessionLocal is None:
        _SessionLocal = sessionmaker(
            bind=get_engine(),
            autocommit=False,
            autoflush=False,
            expire_on_commit=False,  # Allow accessing loaded attributes after session closes
        )
    return _SessionLocal


def init_db() -> None:
    """Initialize the database, creating all tables."""
    engine = get_engine()
    Base.metadata.create_all(bind=engine)


def drop_db() -> None:
    """Drop all tables (use with caution!)."""
    engine = get_engine()
    Base.metadata.drop_all(bind=engine)


@contextmanager
def get_db() -> Generator[Session, None, None]:
    """Get a database session as a context manager.

    Usage:
        with get_db() as db:
            runs = db.query(SweepRun).all()
    """
    SessionLocal = get_session_factory()
    db = SessionLocal()
    try:
        yield db
        db.commit()
    except Exception:
        db.rollback()
        raise
    finally:
        db.close()


@contextmanager
def sqlite_session(path: str | Path) -> Generator[Session, None, None]:
    """Session on a standalone SQLite file, tables created on first use."""
    engine = create_engine(f"sqlite:///{Path(path)}")
    Base.metadata.create_all(bind=engine)
    db = Session(engine, expire_on_commit=False)
    try:
        yield db
        db.commit()
    except Exception:
        db.rollback()
        raise
    finally:
        db.close()
        engine.dispose()


@contextmanager
def record_run(kind: RunKind | str, config: dict | None = None, output_path: str | None = None):
    """Track a sweep in the ``sweep_runs`` table.

    Yields the run id. The row is marked failed, with the error text, if the
    body raises; the exception is re-raised.
    """
    init_db()
    with get_db() as db:
        run = SweepRun(
            kind=RunKind(kind),
            config_json=json.dumps(config) if config is not None else None,
            output_path=str(output_path) if output_path else None,
        )
        db.add(run)
        db.flush()
        run_id = run.id

    try:
        yield run_id
    except Exception as e:
        with get_db() as db:
            run = db.get(SweepRun, run_id)
            run.success = False
            run.error_message = str(e)
            run.finished_at = datetime.utcnow()
        raise

    with get_db() as db:
        db.get(SweepRun, run_id).finished_at = datetime.utcnow()
    logger.info("Recorded %s run %d", RunKind(kind).value, run_id)


def save_heatmap(result, config: dict | None = None, session: Session | None = None) -> int:
    """Store a heatmap result as a finished run with one row per grid point.

    Args:
        result: Heatmap result exposing ``to_frame()`` and ``metadata``
        config: Configuration to store; defaults to the result metadata
        session: Session to use; defaults to the configured database

    Returns:
        The id of the new run.
    """
    frame = result.to_frame()
    config = result.metadata if config is None else config

    def _store(db: Session) -> int:
        now = datetime.utcnow()
        run = SweepRun(
            kind=RunKind.HEATMAP,
            config_json=json.dumps(config),
            started_at=now,
            finished_at=now,
        )
        for position, row in enumerate(frame[POINT_COLUMNS].itertuples(index=False)):
            run.points.append(
                HeatmapPoint(position=position, **{k: float(v) for k, v in row._asdict().items()})
            )
        db.add(run)
        db.flush()
        return run.id

    if session is not None:
        return _store(session)
    init_db()
    with get_db() as db:
        return _store(db)


def load_heatmap(run_id: int, session: Session | None = None) -> tuple[dict, pd.DataFrame]:
    """Stored configuration and heatmap table of a run, in grid order."""

    def _load(db: Session) -> tuple[dict, pd.DataFrame]:
        run = db.get(SweepRun, run_id)
        if run is None:
            raise InvalidInputError(f"no stored run with id {run_id}")
        rows = [[getattr(p, c) for c in POINT_COLUMNS] for p in run.points]
        config = json.loads(run.config_json) if run.config_json else {}
        return config, pd.DataFrame(rows, columns=POINT_COLUMNS)

    if session is not None:
        return _load(session)
    with get_db() as db:
        return _load(db)
