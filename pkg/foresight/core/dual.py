"""
Value forecaster + error forecaster, and sorting of future events into cells
of predicted absolute error.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyDataset, InputDimension
from .series import EmbeddedDataset, Predictability
from .training import EnsembleForecaster, TrainConfig, train_ensemble

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DualModel:
    value_model: EnsembleForecaster
    error_model: EnsembleForecaster
    cell_boundaries: tuple[float, ...]
    n_cells: int
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.n_cells < 2:
            raise ValueError("n_cells must be >= 2")
        if len(self.cell_boundaries) != self.n_cells - 1:
            raise ValueError("n_cells - 1 interior boundaries are required")
        if self.value_model.n_inputs != self.error_model.n_inputs:
            raise ValueError("value and error models differ in input dimension")
        if not self.degenerate and not boundaries_valid(self.cell_boundaries):
            raise ValueError("cell boundaries must be finite, positive and increasing")

    @property
    def n_inputs(self) -> int:
        return self.value_model.n_inputs


@dataclass(frozen=True)
class EventForecast:
    predicted_value: float
    predicted_abs_error: float
    cell: int
    source_index: int
    raw_error_output: float
    actual: Optional[float] = None
    label: Optional[Predictability] = None

    @property
    def clamped(self) -> bool:
        return self.raw_error_output < 0.0


def boundaries_valid(boundaries: tuple[float, ...]) -> bool:
    values = np.asarray(boundaries, dtype=float)
    return bool(
        np.all(np.isfinite(values))
        and np.all(values > 0.0)
        and np.all(np.diff(values) > 0.0)
    )


def quantile_boundaries(residuals: np.ndarray, n_cells: int) -> tuple[float, ...]:
    """
    Interior boundaries at the ceil(k N / n_cells)-th smallest residual (1-based),
    k = 1 .. n_cells - 1. The outer limits are implicitly 0 and +inf.
    """
    ordered = np.sort(np.asarray(residuals, dtype=float))
    n = ordered.size
    if n == 0:
        raise EmptyDataset("no residuals to place boundaries on")
    return tuple(
        float(ordered[math.ceil(k * n / n_cells) - 1]) for k in range(1, n_cells)
    )


def assign_cells(
    predicted_errors: np.ndarray, boundaries: tuple[float, ...], degenerate: bool = False
) -> np.ndarray:
    """1 + number of boundaries strictly below each error; ties go to the lower cell."""
    predicted_errors = np.asarray(predicted_errors, dtype=float)
    if degenerate:
        return np.ones(predicted_errors.shape, dtype=np.int64)
    return 1 + np.searchsorted(np.asarray(boundaries), predicted_errors, side="left")


def in_sample_residuals(model: EnsembleForecaster, train: EmbeddedDataset) -> np.ndarray:
    return np.abs(train.targets - model.predict_batch(train.inputs))


def fit_dual(
    train: EmbeddedDataset, config: TrainConfig, n_cells: int = 2, *, workers: int = 1
) -> DualModel:
    """
    Train the value ensemble, take |residual| of the ensemble fit on the same
    patterns, train the error ensemble on those, and place cell boundaries at
    quantiles of the in-sample residuals.
    """
    if n_cells < 2:
        raise ValueError("n_cells must be >= 2")
    value_model = train_ensemble(train, config, workers=workers)
    residuals = in_sample_residuals(value_model, train)
    error_model = train_ensemble(train.with_targets(residuals), config, workers=workers)

    boundaries = quantile_boundaries(residuals, n_cells)
    degenerate = not boundaries_valid(boundaries)
    if degenerate:
        logger.warning(
            "DegenerateBoundaries: in-sample residual quantiles %s are not positive "
            "and increasing; every event goes to cell 1",
            boundaries,
        )
    return DualModel(
        value_model=value_model,
        error_model=error_model,
        cell_boundaries=boundaries,
        n_cells=n_cells,
        degenerate=degenerate,
    )


def forecast_event(
    model: DualModel, x: np.ndarray, source_index: int
) -> EventForecast:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != model.n_inputs:
        raise InputDimension(model.n_inputs, x.size)
    return _forecast_batch(model, x[None, :], np.array([source_index]))[0]


def _forecast_batch(
    model: DualModel,
    inputs: np.ndarray,
    source_indices: np.ndarray,
    actuals: Optional[np.ndarray] = None,
    labels: Optional[tuple[Predictability, ...]] = None,
) -> list[EventForecast]:
    values = model.value_model.predict_batch(inputs)
    raw_errors = model.error_model.predict_batch(inputs)
    errors = np.maximum(raw_errors, 0.0)
    cells = assign_cells(errors, model.cell_boundaries, model.degenerate)
    return [
        EventForecast(
            predicted_value=float(values[k]),
            predicted_abs_error=float(errors[k]),
            cell=int(cells[k]),
            source_index=int(source_indices[k]),
            raw_error_output=float(raw_errors[k]),
            actual=None if actuals is None else float(actuals[k]),
            label=None if labels is None else labels[k],
        )
        for k in range(len(values))
    ]


def classify_test_set(model: DualModel, test: EmbeddedDataset) -> list[EventForecast]:
    """One forecast per test pattern, in pattern order."""
    if len(test) == 0:
        raise EmptyDataset("test set is empty")
    if test.inputs.shape[1] != model.n_inputs:
        raise InputDimension(model.n_inputs, test.inputs.shape[1])
    return _forecast_batch(
        model, test.inputs, test.source_indices, test.targets, test.labels
    )
