"""
Synthetic benchmark series with ground-truth predictability labels.

Model I   two-valued chain; same-sign states are predictable, mixed-sign are not.
Model II  Henon chaos interleaved with white noise of the same dispersion.
Model III two-valued chain with uniform predictability; half of the states are
          marked predictable arbitrarily (a null benchmark).

Labels always come from the underlying process, never from the noisy values.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Optional

import numpy as np

from .errors import GeneratorDivergence
from .series import Predictability, TimeSeries

logger = logging.getLogger(__name__)

State = tuple[int, int]  # (sign of x_{i-1}, sign of x_i)

ALL_STATES: tuple[State, ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))
SAME_SIGN_STATES: frozenset[State] = frozenset({(1, 1), (-1, -1)})

DRESSING_SIGMA = 0.3
HENON_ESCAPE = 10.0
HENON_TRANSIENT = 1000
HENON_SIGMA_ORBIT = 100_000
MAX_RESTARTS = 100


@dataclass(frozen=True)
class ChainSpec:
    """Probability of the next value being +1 for each predictive state."""

    transition_table: Mapping[State, float]
    noise_sigma: float = DRESSING_SIGMA

    def __post_init__(self) -> None:
        missing = set(ALL_STATES) - set(self.transition_table)
        if missing:
            raise ValueError(f"transition table misses states {sorted(missing)}")
        for state, p in self.transition_table.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} for state {state} outside [0, 1]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")

    def conditional_mean(self, state: State) -> float:
        p = self.transition_table[state]
        return p * 1.0 + (1.0 - p) * -1.0


# Same-sign states flip sign with probability 0.8; mixed-sign states are a coin.
MODEL1_TABLE: dict[State, float] = {
    (1, 1): 0.2,
    (-1, -1): 0.8,
    (1, -1): 0.5,
    (-1, 1): 0.5,
}

# Every state has a 0.2 / 0.8 split: x_{i+1} = -x_{i-1} with probability 0.8.
MODEL3_TABLE: dict[State, float] = {
    (1, 1): 0.2,
    (-1, -1): 0.8,
    (1, -1): 0.2,
    (-1, 1): 0.8,
}


@dataclass(frozen=True)
class RegimeSwitchSpec:
    alpha: float = 1.4
    beta: float = 0.3
    chaotic_duration_range: tuple[int, int] = (1, 58)
    noise_duration_range: tuple[int, int] = (1, 49)

    def __post_init__(self) -> None:
        for name in ("chaotic_duration_range", "noise_duration_range"):
            low, high = getattr(self, name)
            if low < 1 or low > high:
                raise ValueError(f"{name} must satisfy 1 <= low <= high")


# ---------- Random chains (Models I and III) ----------


def _check_length(length: int) -> None:
    if length < 3:
        raise ValueError("generated series need length >= 3")


def _chain(length: int, spec: ChainSpec, rng: np.random.Generator) -> np.ndarray:
    chain = np.empty(length)
    chain[:2] = rng.choice((-1.0, 1.0), size=2)
    uniforms = rng.random(length)
    for i in range(2, length):
        state = (int(chain[i - 2]), int(chain[i - 1]))
        chain[i] = 1.0 if uniforms[i] < spec.transition_table[state] else -1.0
    return chain


def _state_labels(
    chain: np.ndarray, predictable: frozenset[State]
) -> tuple[Predictability, ...]:
    labels = [Predictability.UNDEFINED, Predictability.UNDEFINED]
    for i in range(2, chain.size):
        state = (int(chain[i - 2]), int(chain[i - 1]))
        labels.append(
            Predictability.MORE if state in predictable else Predictability.LESS
        )
    return tuple(labels)


def generate_chain(
    length: int,
    seed: int,
    spec: ChainSpec,
    predictable_states: frozenset[State] = SAME_SIGN_STATES,
) -> TimeSeries:
    """Run the chain on clean values, label from the clean states, then dress."""
    _check_length(length)
    rng = np.random.default_rng(seed)
    chain = _chain(length, spec, rng)
    noise = rng.normal(0.0, 1.0, size=length) * spec.noise_sigma
    return TimeSeries(values=chain + noise, labels=_state_labels(chain, predictable_states))


def generate_model1(
    length: int, seed: int, noise_sigma: float = DRESSING_SIGMA
) -> TimeSeries:
    return generate_chain(length, seed, ChainSpec(MODEL1_TABLE, noise_sigma))


def generate_model3(
    length: int, seed: int, noise_sigma: float = DRESSING_SIGMA
) -> TimeSeries:
    # (+1,+1) and (-1,-1) are the arbitrarily marked half
    return generate_chain(length, seed, ChainSpec(MODEL3_TABLE, noise_sigma))


def chain_transition_frequencies(chain: np.ndarray) -> dict[State, float]:
    """Empirical p(+1 | state) of a clean +/-1 chain; NaN for unseen states."""
    signs = np.sign(np.asarray(chain)).astype(int)
    freqs: dict[State, float] = {}
    for state in ALL_STATES:
        hits = (signs[:-2] == state[0]) & (signs[1:-1] == state[1])
        nexts = signs[2:][hits]
        freqs[state] = float(np.mean(nexts == 1)) if nexts.size else float("nan")
    return freqs


def state_frequencies(chain: np.ndarray) -> dict[State, float]:
    signs = np.sign(np.asarray(chain)).astype(int)
    total = signs.size - 1
    return {
        state: float(np.sum((signs[:-1] == state[0]) & (signs[1:] == state[1])) / total)
        for state in ALL_STATES
    }


# ---------- Henon regime switching (Model II) ----------


def henon_step(x_prev: float, x_cur: float, alpha: float = 1.4, beta: float = 0.3) -> float:
    return 1.0 - alpha * x_cur * x_cur + beta * x_prev


def _burn_in(x_prev: float, x_cur: float, alpha: float, beta: float) -> tuple[float, float]:
    for _ in range(HENON_TRANSIENT):
        x_prev, x_cur = x_cur, henon_step(x_prev, x_cur, alpha, beta)
    return x_prev, x_cur


def henon_orbit(
    length: int, alpha: float = 1.4, beta: float = 0.3, start: tuple[float, float] = (0.0, 0.0)
) -> np.ndarray:
    """`length` on-attractor iterates after discarding the transient."""
    x_prev, x_cur = _burn_in(start[0], start[1], alpha, beta)
    orbit = np.empty(length)
    for i in range(length):
        x_prev, x_cur = x_cur, henon_step(x_prev, x_cur, alpha, beta)
        orbit[i] = x_cur
    return orbit


@lru_cache(maxsize=8)
def henon_sigma(alpha: float = 1.4, beta: float = 0.3) -> float:
    """Population standard deviation of a long Henon orbit."""
    return float(np.std(henon_orbit(HENON_SIGMA_ORBIT, alpha, beta)))


@dataclass
class _Orbit:
    """One persistent on-attractor orbit shared by all chaotic segments."""

    alpha: float
    beta: float
    x_prev: float = 0.0
    x_cur: float = 0.0
    restarts: int = field(default=0)

    def __post_init__(self) -> None:
        self.x_prev, self.x_cur = _burn_in(0.0, 0.0, self.alpha, self.beta)

    def segment(self, duration: int, rng: np.random.Generator) -> np.ndarray:
        while True:
            x_prev, x_cur = self.x_prev, self.x_cur
            out = np.empty(duration)
            escaped = False
            for i in range(duration):
                x_prev, x_cur = x_cur, henon_step(x_prev, x_cur, self.alpha, self.beta)
                if abs(x_cur) > HENON_ESCAPE:
                    escaped = True
                    break
                out[i] = x_cur
            if not escaped:
                self.x_prev, self.x_cur = x_prev, x_cur
                return out

            self.restarts += 1
            if self.restarts > MAX_RESTARTS:
                raise GeneratorDivergence(
                    f"Henon orbit escaped {self.restarts} times (alpha={self.alpha}, beta={self.beta})"
                )
            logger.warning("Henon orbit escaped; restarting segment (%d)", self.restarts)
            start = rng.uniform(-0.1, 0.1, size=2)
            self.x_prev, self.x_cur = _burn_in(
                float(start[0]), float(start[1]), self.alpha, self.beta
            )


def generate_model2(
    length: int, seed: int, spec: Optional[RegimeSwitchSpec] = None
) -> TimeSeries:
    """
    Alternate Henon segments and N(0, sigma_H^2) noise segments with uniformly
    drawn durations. A point is MorePredictable iff it and its two predecessors
    were produced by the Henon rule.
    """
    _check_length(length)
    spec = spec or RegimeSwitchSpec()
    rng = np.random.default_rng(seed)
    sigma = henon_sigma(spec.alpha, spec.beta)
    orbit = _Orbit(spec.alpha, spec.beta)

    chunks: list[np.ndarray] = []
    from_henon: list[np.ndarray] = []
    produced = 0
    chaotic = bool(rng.integers(2))
    while produced < length:
        if chaotic:
            low, high = spec.chaotic_duration_range
            duration = int(rng.integers(low, high + 1))
            chunk = orbit.segment(duration, rng)
        else:
            low, high = spec.noise_duration_range
            duration = int(rng.integers(low, high + 1))
            chunk = rng.normal(0.0, sigma, size=duration)
        chunks.append(chunk)
        from_henon.append(np.full(duration, chaotic))
        produced += duration
        chaotic = not chaotic

    values = np.concatenate(chunks)[:length]
    is_henon = np.concatenate(from_henon)[:length]

    labels = [Predictability.UNDEFINED, Predictability.UNDEFINED]
    for i in range(2, length):
        triple = is_henon[i] and is_henon[i - 1] and is_henon[i - 2]
        labels.append(Predictability.MORE if triple else Predictability.LESS)
    return TimeSeries(values=values, labels=tuple(labels))


def generate(model: int, length: int, seed: int) -> TimeSeries:
    generators = {1: generate_model1, 2: generate_model2, 3: generate_model3}
    try:
        return generators[model](length, seed)
    except KeyError:
        raise ValueError(f"unknown model {model}; expected 1, 2 or 3") from None
