"""SQLAlchemy models for stored sweep runs."""

from datetime import datetime
from enum import Enum

from sqlalchemy import (
    Boolean,
    Column,
    DateTime,
    Float,
    ForeignKey,
    Integer,
    String,
    Text,
)
from sqlalchemy import (
    Enum as SQLEnum,
)
from sqlalchemy.orm import DeclarativeBase, relationship


class Base(DeclarativeBase):
    """Base class for all models."""
    pass


class RunKind(str, Enum):
    """Kind of sweep stored in a run."""
    HEATMAP = "heatmap"
    BATH_SWEEP = "bath_sweep"


class SweepRun(Base):
    """One heatmap or bath-sweep invocation."""

    __tablename__ = "sweep_runs"

    id = Column(Integer, primary_key=True, autoincrement=True)

    kind = Column(SQLEnum(RunKind), nullable=False)
    config_json = Column(Text, nullable=True)  # Model, grid and scan resolution
    output_path = Column(String(1000), nullable=True)

    started_at = Column(DateTime, default=datetime.utcnow, nullable=False)
    finished_at = Column(DateTime, nullable=True)

    success = Column(Boolean, default=True)
    error_message = Column(Text, nullable=True)

    # Relationships
    points = relationship(
        "HeatmapPoint",
        back_populates="run",
        cascade="all, delete-orphan",
        order_by="HeatmapPoint.position",
    )

    def __repr__(self) -> str:
        return f"<SweepRun(id={self.id}, kind='{self.kind.value}', success={self.success})>"

    @property
    def duration_seconds(self) -> float | None:
        """Wall time of the run, when it has finished."""
        if not self.finished_at or not self.started_at:
            return None
        return (self.finished_at - self.started_at).total_seconds()


class HeatmapPoint(Base):
    """Maximum separability of the four eigenstates at one (J0x, V0x)."""

    __tablename__ = "heatmap_points"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey("sweep_runs.id"), nullable=False)

    # Row-major grid position
    position = Column(Integer, nullable=False)
    J0x = Column(Float, nullable=False)
    V0x = Column(Float, nullable=False)

    zmax_gs = Column(Float, nullable=False)
    zmax_e1 = Column(Float, nullable=False)
    zmax_e2 = Column(Float, nullable=False)
    zmax_e3 = Column(Float, nullable=False)
    zmax_mean = Column(Float, nullable=False)
    zmax_std = Column(Float, nullable=False)

    run = relationship("SweepRun", back_populates="points")

    def __repr__(self) -> str:
        return f"<HeatmapPoint(J0x={self.J0x}, V0x={self.V0x}, mean={self.zmax_mean:.4f})>"

    @property
    def zmax(self) -> list[float]:
        return [self.zmax_gs, self.zmax_e1, self.zmax_e2, self.zmax_e3]
