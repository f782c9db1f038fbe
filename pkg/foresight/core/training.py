"""
Training protocol: random fit/validation halves, early stopping along the
simplex trace, N_1 restarts and an N_2-member averaged ensemble.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import InputDimension, TooFewPatterns
from .mlp import (
    Normalizer,
    Perceptron,
    evaluate_packed,
    forward_batch,
    squared_error,
    unpack,
    weight_count,
)
from .series import EmbeddedDataset
from .simplex import nelder_mead

logger = logging.getLogger(__name__)

MIN_PATTERNS = 4


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    n_trials: int = Field(default=50, ge=1, description="N_1, restarts per ensemble")
    n_combined: int = Field(default=25, ge=1, description="N_2, members averaged")
    n_neurons: int = Field(default=4, ge=1, description="N_N, hidden units")
    max_simplex_iterations: int = Field(default=5000, ge=1)
    convergence_ftol: float = Field(default=1e-8, gt=0)
    init_weight_range: float = Field(default=1.0, gt=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_combined(self) -> "TrainConfig":
        if self.n_combined > self.n_trials:
            raise ValueError("n_combined must not exceed n_trials")
        return self


@dataclass(frozen=True)
class RestartResult:
    weights: np.ndarray
    validation_best_cost: float
    final_validation_cost: float
    whole_sample_cost: float
    iterations: int


SeedLike = int | np.random.SeedSequence


def _train_arrays(
    inputs: np.ndarray,
    targets: np.ndarray,
    config: TrainConfig,
    restart_seed: SeedLike,
) -> RestartResult:
    n_patterns, n_inputs = inputs.shape
    n_neurons = config.n_neurons
    rng = np.random.default_rng(restart_seed)

    order = rng.permutation(n_patterns)
    fit_idx, val_idx = order[: n_patterns // 2], order[n_patterns // 2 :]
    fit_x, fit_y = inputs[fit_idx], targets[fit_idx]
    val_x, val_y = inputs[val_idx], targets[val_idx]

    def fit_cost(vector: np.ndarray) -> float:
        return squared_error(evaluate_packed(vector, fit_x, n_inputs, n_neurons), fit_y)

    def validation_cost(vector: np.ndarray) -> float:
        return squared_error(evaluate_packed(vector, val_x, n_inputs, n_neurons), val_y)

    start = rng.uniform(
        -config.init_weight_range,
        config.init_weight_range,
        size=weight_count(n_inputs, n_neurons),
    )
    result = nelder_mead(
        fit_cost,
        start,
        max_iterations=config.max_simplex_iterations,
        ftol=config.convergence_ftol,
    )

    # Early stopping: the best vertex never changes between many iterations,
    # so validation E is only recomputed when it does.
    best_weights = result.trace[0].vertex
    best_val = np.inf
    previous: Optional[np.ndarray] = None
    previous_val = np.inf
    for point in result.trace:
        if previous is None or not np.array_equal(point.vertex, previous):
            previous_val = validation_cost(point.vertex)
            previous = point.vertex
        if previous_val < best_val:
            best_val = previous_val
            best_weights = point.vertex

    whole = squared_error(
        evaluate_packed(best_weights, inputs, n_inputs, n_neurons), targets
    )
    return RestartResult(
        weights=best_weights.copy(),
        validation_best_cost=float(best_val),
        final_validation_cost=float(previous_val),
        whole_sample_cost=whole,
        iterations=result.iterations,
    )


def train_single(
    dataset: EmbeddedDataset, config: TrainConfig, restart_seed: SeedLike
) -> RestartResult:
    """
    One restart: split the patterns into halves (floor(N/2) fit, rest validation),
    minimize the fit-half cost from random weights, and keep the trace vertex
    with the least validation cost.
    """
    if len(dataset) < MIN_PATTERNS:
        raise TooFewPatterns(
            f"{len(dataset)} patterns; training needs at least {MIN_PATTERNS}"
        )
    return _train_arrays(dataset.inputs, dataset.targets, config, restart_seed)


def restart_seeds(config: TrainConfig) -> list[np.random.SeedSequence]:
    """Per-restart streams derived by index, independent of scheduling."""
    return np.random.SeedSequence(config.seed).spawn(config.n_trials)


def _restart_job(
    args: tuple[np.ndarray, np.ndarray, TrainConfig, np.random.SeedSequence]
) -> RestartResult:
    return _train_arrays(*args)


@dataclass(frozen=True)
class EnsembleForecaster:
    members: tuple[Perceptron, ...]
    normalizer: Normalizer
    member_train_costs: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("an ensemble needs at least one member")
        if len(self.member_train_costs) != len(self.members):
            raise ValueError("one training cost per member is required")
        shapes = {(m.n_inputs, m.n_neurons) for m in self.members}
        if len(shapes) != 1:
            raise ValueError("ensemble members differ in shape")
        costs = self.member_train_costs
        if any(later < earlier for earlier, later in zip(costs, costs[1:])):
            raise ValueError("member_train_costs must be non-decreasing")

    @property
    def n_inputs(self) -> int:
        return self.members[0].n_inputs

    @property
    def n_neurons(self) -> int:
        return self.members[0].n_neurons

    def standardized_outputs(self, inputs: np.ndarray) -> np.ndarray:
        """Member outputs in standardized target units, shape (members, N)."""
        scaled = self.normalizer.scale_inputs(inputs)
        return np.stack([forward_batch(member, scaled) for member in self.members])

    def predict_batch(self, inputs: np.ndarray) -> np.ndarray:
        inputs = np.asarray(inputs, dtype=float)
        if inputs.ndim != 2 or inputs.shape[1] != self.n_inputs:
            raise InputDimension(self.n_inputs, int(inputs.shape[-1]) if inputs.ndim else 0)
        mean = self.standardized_outputs(inputs).mean(axis=0)
        return self.normalizer.unscale_targets(mean)


def predict(ensemble: EnsembleForecaster, x: Sequence[float] | np.ndarray) -> float:
    """Standardize, average the members, de-standardize."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != ensemble.n_inputs:
        raise InputDimension(ensemble.n_inputs, x.size)
    return float(ensemble.predict_batch(x[None, :])[0])


def train_ensemble(
    dataset: EmbeddedDataset, config: TrainConfig, *, workers: int = 1
) -> EnsembleForecaster:
    """
    Fit the normalizer on the whole training set, run N_1 restarts and keep the
    N_2 with the least whole-sample cost (ties resolved by restart index).
    """
    if len(dataset) < MIN_PATTERNS:
        raise TooFewPatterns(
            f"{len(dataset)} patterns; training needs at least {MIN_PATTERNS}"
        )
    normalizer = Normalizer.fit(dataset.inputs, dataset.targets)
    x = normalizer.scale_inputs(dataset.inputs)
    y = normalizer.scale_targets(dataset.targets)

    jobs = [(x, y, config, seed) for seed in restart_seeds(config)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_restart_job, jobs))
    else:
        results = [_restart_job(job) for job in jobs]

    for index, res in enumerate(results):
        logger.debug(
            "restart %d: %d iterations, validation E %.5g, whole E %.5g",
            index,
            res.iterations,
            res.validation_best_cost,
            res.whole_sample_cost,
        )

    costs = np.array([res.whole_sample_cost for res in results])
    chosen = np.argsort(costs, kind="stable")[: config.n_combined]
    n_inputs = dataset.m
    members = tuple(
        unpack(results[i].weights, n_inputs, config.n_neurons) for i in chosen
    )
    return EnsembleForecaster(
        members=members,
        normalizer=normalizer,
        member_train_costs=tuple(float(costs[i]) for i in chosen),
    )
