"""
Rolling-window experiment: load or generate a series, transform, embed, and for
every window fit the dual model on the training part and score the test part.
"""
from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..integrations import artifacts
from .dual import DualModel, EventForecast, classify_test_set, fit_dual
from .errors import ConfigError, DataError, FoldFailed, ForesightError
from .evaluation import (
    Aggregate,
    FoldReport,
    ReportOptions,
    aggregate,
    fold_report,
    training_residual_pairs,
)
from .generators import generate
from .series import (
    EmbeddedDataset,
    TimeSeries,
    Window,
    embed,
    normalized_difference,
    read_series_csv,
    rolling_windows,
)
from .training import TrainConfig

logger = logging.getLogger(__name__)

Source = Literal["model1", "model2", "model3", "csv"]
Transform = Literal["none", "normalized_difference"]


class ExperimentConfig(BaseModel):
    """
    Mirrors the JSON config document. Omitted fields take the benchmark defaults;
    `tau`, `transform` and `price_statistics` default by source.
    """

    model_config = ConfigDict(extra="forbid")

    source: Source = "model1"
    csv_path: Optional[Path] = None
    transform: Optional[Transform] = None
    m: int = Field(default=2, ge=1)
    tau: Optional[int] = Field(default=None, ge=1)
    train_size: int = 200
    test_size: int = Field(default=100, ge=1)
    step: int = Field(default=100, ge=1)
    train_config: TrainConfig = TrainConfig()
    n_cells: int = Field(default=2, ge=2)
    series_length: int = Field(default=1200, ge=3)
    seed: int = Field(default=0, ge=0, description="generator seed")
    output_dir: Optional[Path] = None
    price_statistics: Optional[bool] = None

    @model_validator(mode="after")
    def resolve_defaults(self) -> "ExperimentConfig":
        if self.source == "csv":
            if self.csv_path is None:
                raise ValueError("source 'csv' requires csv_path")
        elif self.csv_path is not None:
            raise ValueError("csv_path is only valid with source 'csv'")

        if self.tau is None:
            self.tau = 3 if self.source == "csv" else 1
        if self.transform is None:
            self.transform = "normalized_difference" if self.source == "csv" else "none"
        if self.price_statistics is None:
            self.price_statistics = self.transform == "normalized_difference"

        history = (self.m - 1) * self.tau + 1
        if self.train_size <= history:
            raise ValueError(
                f"train_size must exceed (m-1)*tau + 1 = {history}"
            )
        return self

    @property
    def history(self) -> int:
        """Patterns lost at a training window's left edge."""
        return (self.m - 1) * self.tau + 1  # type: ignore[operator]


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        payload = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: the config document must be a JSON object")
    try:
        config = ExperimentConfig.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if config.csv_path is not None and not config.csv_path.is_absolute():
        config.csv_path = (path.parent / config.csv_path).resolve()
    return config


def load_series(config: ExperimentConfig) -> TimeSeries:
    if config.source == "csv":
        assert config.csv_path is not None
        if not config.csv_path.exists():
            raise DataError(f"CSV source {config.csv_path} does not exist")
        series = read_series_csv(config.csv_path)
    else:
        model = int(config.source[-1])
        series = generate(model, config.series_length, config.seed)
    if config.transform == "normalized_difference":
        series = normalized_difference(series)
    return series


@dataclass(frozen=True)
class FoldOutcome:
    report: FoldReport
    events: list[EventForecast]
    model: DualModel
    window: Window
    train_patterns: int


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    series_length: int
    folds: list[FoldOutcome]
    summary: Aggregate
    output_dir: Optional[Path] = None

    @property
    def reports(self) -> list[FoldReport]:
        return [f.report for f in self.folds]


def run_fold(
    fold: int, window: Window, dataset: EmbeddedDataset, config: ExperimentConfig
) -> FoldOutcome:
    """Fit on the causal training window, classify and score the test window."""
    try:
        train = dataset.select_window(*window.train, causal=True)
        test = dataset.select_window(*window.test, causal=False)
        logger.info(
            "fold %d: train %s (%d patterns), test %s (%d patterns)",
            fold, window.train, len(train), window.test, len(test),
        )
        model = fit_dual(train, config.train_config, config.n_cells)
        events = classify_test_set(model, test)
        report = fold_report(
            model,
            test,
            training_residual_pairs(model, train),
            ReportOptions(price_statistics=bool(config.price_statistics)),
            events=events,
            fold=fold,
        )
    except ForesightError as exc:
        raise FoldFailed(fold, exc) from exc
    except ValueError as exc:
        raise FoldFailed(fold, exc) from exc

    logger.info(
        "fold %d: n_1=%d n_2=%d eps_1=%s eps_t=%.3f",
        fold, report.n_1, report.n_2,
        "-" if report.eps_1 is None else f"{report.eps_1:.3f}",
        report.eps_t,
    )
    return FoldOutcome(
        report=report, events=events, model=model, window=window, train_patterns=len(train)
    )


def _fold_job(args: tuple[int, Window, EmbeddedDataset, ExperimentConfig]) -> FoldOutcome:
    return run_fold(*args)


def run_experiment(
    config: ExperimentConfig,
    *,
    workers: int = 1,
    output_dir: Optional[Path] = None,
    ledger_url: Optional[str] = None,
) -> ExperimentResult:
    """
    Run every rolling window. Folds may execute in parallel; outcomes are
    gathered in fold order and written by this process only. Nothing is
    written unless every fold succeeds.
    """
    series = load_series(config)
    windows = rolling_windows(
        len(series), config.train_size, config.test_size, config.step
    )
    if not windows:
        raise DataError(
            f"series of {len(series)} points holds no window of "
            f"{config.train_size} + {config.test_size}"
        )
    dataset = embed(series, config.m, config.tau)  # type: ignore[arg-type]
    logger.info(
        "%s: %d points, %d windows, %d patterns dropped at each training edge",
        config.source, len(series), len(windows), config.history,
    )

    jobs = [(k + 1, w, dataset, config) for k, w in enumerate(windows)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            folds = list(pool.map(_fold_job, jobs))
    else:
        folds = [_fold_job(job) for job in jobs]

    summary = aggregate([f.report for f in folds])
    result = ExperimentResult(
        config=config, series_length=len(series), folds=folds, summary=summary
    )

    if output_dir is not None:
        write_outputs(result, output_dir)
        result = ExperimentResult(
            config=config,
            series_length=len(series),
            folds=folds,
            summary=summary,
            output_dir=output_dir,
        )
        if ledger_url:
            from .ledger import record_run

            record_run(
                ledger_url,
                source=config.source,
                output_dir=str(output_dir),
                config_json=config.model_dump_json(),
                reports=result.reports,
                summary=summary,
            )
    return result


def run_header(result: ExperimentResult) -> dict:
    config = result.config
    return {
        "config": json.loads(config.model_dump_json()),
        "series_points": result.series_length,
        "index_base": 1,
        "dropped_history_patterns": config.history,
        "note": (
            "training patterns whose delayed inputs precede the window are dropped; "
            "test patterns may use up to (m-1)*tau+1 points before the test window"
        ),
        "windows": [
            {
                "fold": k + 1,
                "train": list(f.window.train),
                "test": list(f.window.test),
                "train_patterns": f.train_patterns,
            }
            for k, f in enumerate(result.folds)
        ],
    }


def write_outputs(result: ExperimentResult, output_dir: Path) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    config = result.config
    (output_dir / "config.json").write_text(
        json.dumps(run_header(result), indent=2), encoding="utf-8"
    )
    artifacts.write_fold_reports(
        result.reports, output_dir / "folds.csv", output_dir / "folds.json"
    )
    artifacts.write_aggregate(
        result.summary, output_dir / "aggregate.csv", output_dir / "aggregate.json"
    )
    for fold in result.folds:
        tag = f"fold_{fold.report.fold:02d}"
        artifacts.write_events_csv(fold.events, output_dir / "events" / f"{tag}.csv")
        artifacts.save_dual_model(
            fold.model,
            output_dir / "models" / tag,
            m=config.m,
            tau=config.tau,  # type: ignore[arg-type]
            transform=config.transform or "none",
            config=config.train_config,
        )
    logger.info("artifacts written to %s", output_dir)
