"""Run ledger: one row per finished experiment, one per fold."""
from __future__ import annotations

import logging
from typing import Sequence

from sqlalchemy import select

from ..models import ExperimentRun, FoldRecord
from .database import make_engine, make_session_factory
from .evaluation import Aggregate, FoldReport

logger = logging.getLogger(__name__)


def record_run(
    database_url: str,
    *,
    source: str,
    output_dir: str,
    config_json: str,
    reports: Sequence[FoldReport],
    summary: Aggregate,
) -> int:
    engine = make_engine(database_url)
    means = summary.means()
    db = make_session_factory(engine)()
    try:
        run = ExperimentRun(
            source=source,
            output_dir=output_dir,
            config_json=config_json,
            n_folds=len(reports),
            mean_eps_1=means.get("eps_1"),
            mean_eps_t=means.get("eps_t"),
            mean_f_1=means.get("f_1"),
            aggregate_json=summary.model_dump_json(),
        )
        for report in reports:
            run.folds.append(
                FoldRecord(
                    fold=report.fold,
                    n_1=report.n_1,
                    n_2=report.n_2,
                    eps_1=report.eps_1,
                    eps_t=report.eps_t,
                    report_json=report.model_dump_json(),
                )
            )
        db.add(run)
        db.commit()
        db.refresh(run)
        logger.info("recorded run %d in the ledger", run.id)
        return run.id
    finally:
        db.close()
        engine.dispose()


def list_runs(database_url: str, limit: int = 20) -> list[ExperimentRun]:
    engine = make_engine(database_url)
    db = make_session_factory(engine)()
    try:
        stmt = select(ExperimentRun).order_by(ExperimentRun.id.desc()).limit(limit)
        runs = list(db.scalars(stmt))
        for run in runs:
            db.expunge(run)
        return runs
    finally:
        db.close()
        engine.dispose()
