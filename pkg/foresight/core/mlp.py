"""
One-hidden-layer perceptron with logistic hidden units and a linear output.

Flat parameter layout (pack order), for n inputs and N neurons:
    hidden weights row-major, one row per neuron: w_1j .. w_nj, bias_j
    output weights w_1 .. w_N, then the output bias w_0
Total length N * (n + 1) + N + 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyDataset, InputDimension, ShapeMismatch

LOGISTIC_CLAMP = 500.0


def weight_count(n_inputs: int, n_neurons: int) -> int:
    return n_neurons * (n_inputs + 1) + n_neurons + 1


def logistic(z: np.ndarray) -> np.ndarray:
    z = np.clip(z, -LOGISTIC_CLAMP, LOGISTIC_CLAMP)
    return 1.0 / (1.0 + np.exp(-z))


@dataclass(frozen=True)
class Perceptron:
    n_inputs: int
    n_neurons: int
    hidden_weights: np.ndarray  # (n_neurons, n_inputs + 1), bias last
    output_weights: np.ndarray  # (n_neurons + 1,), bias last

    def __post_init__(self) -> None:
        hidden = np.array(self.hidden_weights, dtype=float)
        output = np.array(self.output_weights, dtype=float).reshape(-1)
        if hidden.shape != (self.n_neurons, self.n_inputs + 1):
            raise ShapeMismatch(
                f"hidden weights shape {hidden.shape}, expected "
                f"{(self.n_neurons, self.n_inputs + 1)}"
            )
        if output.shape != (self.n_neurons + 1,):
            raise ShapeMismatch(
                f"output weights shape {output.shape}, expected {(self.n_neurons + 1,)}"
            )
        if not (np.all(np.isfinite(hidden)) and np.all(np.isfinite(output))):
            raise ValueError("perceptron weights must be finite")
        hidden.setflags(write=False)
        output.setflags(write=False)
        object.__setattr__(self, "hidden_weights", hidden)
        object.__setattr__(self, "output_weights", output)

    @property
    def weight_count(self) -> int:
        return weight_count(self.n_inputs, self.n_neurons)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Perceptron):
            return NotImplemented
        return (
            self.n_inputs == other.n_inputs
            and self.n_neurons == other.n_neurons
            and np.array_equal(self.hidden_weights, other.hidden_weights)
            and np.array_equal(self.output_weights, other.output_weights)
        )

    __hash__ = None  # type: ignore[assignment]


def pack(net: Perceptron) -> np.ndarray:
    return np.concatenate([net.hidden_weights.ravel(), net.output_weights])


def unpack(vector: np.ndarray, n_inputs: int, n_neurons: int) -> Perceptron:
    vector = np.asarray(vector, dtype=float).reshape(-1)
    expected = weight_count(n_inputs, n_neurons)
    if vector.size != expected:
        raise ShapeMismatch(
            f"weight vector has {vector.size} entries, expected {expected} "
            f"for {n_inputs} inputs and {n_neurons} neurons"
        )
    split = n_neurons * (n_inputs + 1)
    return Perceptron(
        n_inputs=n_inputs,
        n_neurons=n_neurons,
        hidden_weights=vector[:split].reshape(n_neurons, n_inputs + 1),
        output_weights=vector[split:],
    )


def evaluate_packed(
    vector: np.ndarray, inputs: np.ndarray, n_inputs: int, n_neurons: int
) -> np.ndarray:
    """Network outputs for a batch of inputs straight from a packed vector."""
    split = n_neurons * (n_inputs + 1)
    hidden = vector[:split].reshape(n_neurons, n_inputs + 1)
    pre = inputs @ hidden[:, :-1].T + hidden[:, -1]
    return logistic(pre) @ vector[split:-1] + vector[-1]


def forward_batch(net: Perceptron, inputs: np.ndarray) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != net.n_inputs:
        got = inputs.shape[-1] if inputs.ndim else 0
        raise InputDimension(net.n_inputs, int(got))
    return evaluate_packed(pack(net), inputs, net.n_inputs, net.n_neurons)


def forward(net: Perceptron, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != net.n_inputs:
        raise InputDimension(net.n_inputs, x.size)
    return float(forward_batch(net, x[None, :])[0])


def squared_error(outputs: np.ndarray, targets: np.ndarray) -> float:
    if targets.size == 0:
        raise EmptyDataset("cost of an empty dataset is undefined")
    residual = targets - outputs
    return float(np.mean(residual * residual))


def cost(net: Perceptron, inputs: np.ndarray, targets: np.ndarray) -> float:
    """E = (1/N_t) * sum (target - output)^2."""
    targets = np.asarray(targets, dtype=float).reshape(-1)
    if targets.size == 0:
        raise EmptyDataset("cost of an empty dataset is undefined")
    return squared_error(forward_batch(net, inputs), targets)


@dataclass(frozen=True)
class Normalizer:
    """z-score constants fitted on a training sample; zero stds become 1."""

    input_means: np.ndarray
    input_stds: np.ndarray
    target_mean: float
    target_std: float

    @classmethod
    def fit(cls, inputs: np.ndarray, targets: np.ndarray) -> "Normalizer":
        inputs = np.asarray(inputs, dtype=float)
        targets = np.asarray(targets, dtype=float)
        if targets.size == 0:
            raise EmptyDataset("cannot fit a normalizer on an empty dataset")
        input_stds = inputs.std(axis=0)
        input_stds[input_stds == 0.0] = 1.0
        target_std = float(targets.std())
        return cls(
            input_means=inputs.mean(axis=0),
            input_stds=input_stds,
            target_mean=float(targets.mean()),
            target_std=target_std if target_std > 0.0 else 1.0,
        )

    def scale_inputs(self, inputs: np.ndarray) -> np.ndarray:
        return (np.asarray(inputs, dtype=float) - self.input_means) / self.input_stds

    def scale_targets(self, targets: np.ndarray) -> np.ndarray:
        return (np.asarray(targets, dtype=float) - self.target_mean) / self.target_std

    def unscale_targets(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=float) * self.target_std + self.target_mean

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Normalizer):
            return NotImplemented
        return (
            np.array_equal(self.input_means, other.input_means)
            and np.array_equal(self.input_stds, other.input_stds)
            and self.target_mean == other.target_mean
            and self.target_std == other.target_std
        )

    __hash__ = None  # type: ignore[assignment]
