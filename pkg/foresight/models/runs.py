from datetime import datetime

from sqlalchemy import DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import Mapped, mapped_column, relationship

from ..core.database import Base


class ExperimentRun(Base):
    __tablename__ = "experiment_runs"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, index=True)
    source: Mapped[str] = mapped_column(String(64))  # model1 | model2 | model3 | csv
    output_dir: Mapped[str] = mapped_column(String(512))
    config_json: Mapped[str] = mapped_column(Text)
    n_folds: Mapped[int] = mapped_column(Integer)

    mean_eps_1: Mapped[float | None] = mapped_column(Float, nullable=True)
    mean_eps_t: Mapped[float | None] = mapped_column(Float, nullable=True)
    mean_f_1: Mapped[float | None] = mapped_column(Float, nullable=True)
    aggregate_json: Mapped[str] = mapped_column(Text)

    created_at: Mapped[datetime] = mapped_column(DateTime, default=datetime.utcnow)

    folds: Mapped[list["FoldRecord"]] = relationship(
        back_populates="run", cascade="all, delete-orphan", order_by="FoldRecord.fold"
    )


class FoldRecord(Base):
    __tablename__ = "fold_records"

    id: Mapped[int] = mapped_column(Integer, primary_key=True, index=True)
    run_id: Mapped[int] = mapped_column(ForeignKey("experiment_runs.id"), index=True)
    fold: Mapped[int] = mapped_column(Integer)

    n_1: Mapped[int] = mapped_column(Integer)
    n_2: Mapped[int] = mapped_column(Integer)
    eps_1: Mapped[float | None] = mapped_column(Float, nullable=True)
    eps_t: Mapped[float] = mapped_column(Float)
    report_json: Mapped[str] = mapped_column(Text)

    run: Mapped[ExperimentRun] = relationship(back_populates="folds")
