"""
Built-in sanity suite behind the `selfcheck` command: small closed-form cases
for every module plus optimizer checks on a quadratic and the Rosenbrock valley.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dual import assign_cells
from .errors import DegenerateDifference, SeriesTooShort, ShapeMismatch
from .evaluation import (
    label_fraction,
    normalized_rmse,
    pearson,
    sign_fraction,
    two_sample_t,
    u_statistic,
)
from .generators import (
    ALL_STATES,
    MODEL1_TABLE,
    MODEL3_TABLE,
    ChainSpec,
    generate_model1,
    henon_step,
)
from .mlp import Normalizer, Perceptron, cost, forward, pack, unpack, weight_count
from .series import Predictability, TimeSeries, embed, normalized_difference, rolling_windows
from .simplex import nelder_mead
from .training import EnsembleForecaster, predict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


CHECKS: list[tuple[str, Callable[[], None]]] = []


def check(name: str):
    def register(fn: Callable[[], None]) -> Callable[[], None]:
        CHECKS.append((name, fn))
        return fn

    return register


class CheckFailed(Exception):
    pass


def _expect(condition: object, detail: object = "") -> None:
    if not condition:
        raise CheckFailed(str(detail) or "check failed")


def _close(a: float, b: float, tol: float = 1e-12) -> bool:
    return abs(a - b) <= tol


def _raises(exc_type: type[BaseException], fn: Callable[[], object]) -> bool:
    try:
        fn()
    except exc_type:
        return True
    return False


# ---------- series ----------


@check("embed m=2 tau=1")
def _embed_tau1() -> None:
    ds = embed(TimeSeries(np.arange(1.0, 6.0)), 2, 1)
    _expect(ds.inputs.tolist() == [[2, 1], [3, 2], [4, 3]], ds.inputs.tolist())
    _expect(ds.targets.tolist() == [3, 4, 5])


@check("embed m=2 tau=3")
def _embed_tau3() -> None:
    ds = embed(TimeSeries(np.arange(1.0, 7.0)), 2, 3)
    _expect(ds.inputs.tolist() == [[4, 1], [5, 2]], ds.inputs.tolist())
    _expect(ds.targets.tolist() == [5, 6])


@check("embed rejects short series")
def _embed_short() -> None:
    _expect(_raises(SeriesTooShort, lambda: embed(TimeSeries([1.0, 2.0, 3.0]), 2, 3)))


@check("normalized difference")
def _normalized_difference() -> None:
    out = normalized_difference(TimeSeries([100.0, 110.0])).values
    _expect(_close(out[0], 20.0 / 210.0))
    _expect(normalized_difference(TimeSeries([5.0, 5.0, 5.0])).values.tolist() == [0, 0])
    _expect(_raises(DegenerateDifference, lambda: normalized_difference(TimeSeries([1.0, -1.0]))))


@check("rolling windows")
def _rolling_windows() -> None:
    _expect(len(rolling_windows(300, 200, 100, 100)) == 1)
    _expect(rolling_windows(299, 200, 100, 100) == [])


# ---------- generators ----------


@check("chain conditional means")
def _conditional_means() -> None:
    _expect(_close(ChainSpec(MODEL1_TABLE).conditional_mean((1, 1)), -0.6))
    spec3 = ChainSpec(MODEL3_TABLE)
    _expect(all(_close(abs(spec3.conditional_mean(s)), 0.6) for s in ALL_STATES))


@check("undressed chain is two-valued")
def _undressed() -> None:
    values = generate_model1(200, seed=1, noise_sigma=0.0).values
    _expect(set(np.unique(values).tolist()) <= {-1.0, 1.0})


@check("henon step")
def _henon() -> None:
    _expect(_close(henon_step(0.0, 0.0), 1.0))
    _expect(_close(henon_step(1.0, 1.0), -0.1))


# ---------- mlp ----------


def _net(hidden: list[list[float]], output: list[float]) -> Perceptron:
    hidden_arr = np.array(hidden, dtype=float)
    return Perceptron(
        n_inputs=hidden_arr.shape[1] - 1,
        n_neurons=hidden_arr.shape[0],
        hidden_weights=hidden_arr,
        output_weights=np.array(output, dtype=float),
    )


@check("perceptron forward")
def _forward() -> None:
    zeros = _net([[0.0, 0.0, 0.0]] * 4, [0.0] * 5)
    _expect(forward(zeros, np.array([0.3, -2.0])) == 0.0)
    halves = _net([[0.0, 0.0, 0.0]] * 4, [1.0, 1.0, 1.0, 1.0, 0.0])
    _expect(_close(forward(halves, np.array([0.3, -2.0])), 2.0))
    saturated = _net([[0.0, 1000.0]], [2.0, 0.5])
    _expect(_close(forward(saturated, np.array([1.0])), 2.5))


@check("perceptron cost")
def _cost() -> None:
    zeros = _net([[0.0, 0.0]], [0.0, 0.0])
    _expect(cost(zeros, np.array([[1.0], [2.0]]), np.array([1.0, -1.0])) == 1.0)


@check("weight packing")
def _packing() -> None:
    _expect(weight_count(2, 4) == 17)
    vector = np.random.default_rng(3).normal(size=17)
    _expect(np.array_equal(pack(unpack(vector, 2, 4)), vector))
    _expect(_raises(ShapeMismatch, lambda: unpack(np.zeros(16), 2, 4)))


@check("ensemble of opposite members predicts the target mean")
def _opposite_members() -> None:
    member = _net([[0.0, 0.0]], [0.0, 0.7])
    mirror = _net([[0.0, 0.0]], [0.0, -0.7])
    ensemble = EnsembleForecaster(
        members=(member, mirror),
        normalizer=Normalizer(np.zeros(1), np.ones(1), target_mean=1.5, target_std=2.0),
        member_train_costs=(0.0, 0.0),
    )
    _expect(_close(predict(ensemble, [0.4]), 1.5))


# ---------- simplex ----------


@check("simplex on a convex quadratic")
def _quadratic() -> None:
    result = nelder_mead(lambda v: float(np.sum(v * v)), np.array([3.0, 4.0]))
    _expect(np.linalg.norm(result.best) < 1e-4, result.best)
    _expect(result.best_cost < 1e-6)


@check("simplex on a constant cost")
def _constant() -> None:
    result = nelder_mead(lambda v: 7.0, np.array([1.0, 2.0]), max_iterations=50)
    _expect(result.best_cost == 7.0)


@check("simplex on the Rosenbrock valley")
def _rosenbrock() -> None:
    def rosen(v: np.ndarray) -> float:
        return float(100.0 * (v[1] - v[0] ** 2) ** 2 + (1.0 - v[0]) ** 2)

    result = nelder_mead(rosen, np.array([-1.2, 1.0]), ftol=1e-14)
    _expect(np.allclose(result.best, [1.0, 1.0], atol=1e-3), result.best)


# ---------- cells and statistics ----------


@check("cell assignment ties go to the lower cell")
def _cells() -> None:
    cells = assign_cells(np.array([0.1, 0.5, 0.9]), (0.5,))
    _expect(cells.tolist() == [1, 1, 2])


@check("normalized rmse of the mean forecast")
def _mean_forecast() -> None:
    actual = np.array([1.0, 3.0, -2.0, 6.0])
    mean = np.full_like(actual, actual.mean())
    _expect(_close(normalized_rmse(actual, mean, float(np.std(actual))), 1.0))
    _expect(normalized_rmse(actual, actual, float(np.std(actual))) == 0.0)


@check("u statistic and sign hits")
def _price_stats() -> None:
    actual = np.array([0.2, -0.1, 0.4])
    _expect(u_statistic(actual, np.zeros(3)) == 1.0)
    _expect(u_statistic(actual, actual) == 0.0)
    _expect(sign_fraction(actual, actual) == 1.0)
    _expect(sign_fraction(actual, -actual) == 0.0)


@check("label fractions")
def _fractions() -> None:
    _expect(label_fraction([Predictability.MORE] * 3) == 1.0)
    _expect(label_fraction([Predictability.LESS] * 3) == 0.0)


@check("pearson correlation")
def _pearson() -> None:
    xs = np.array([0.5, 1.0, 4.0, -2.0])
    _expect(_close(pearson(xs, 2.0 * xs + 3.0), 1.0))
    _expect(_close(pearson(xs, -xs), -1.0))


@check("two-sample t")
def _t_test() -> None:
    sample = np.arange(10.0)
    t, df = two_sample_t(sample, sample)
    _expect(t == 0.0 and df == 18)
    jitter = np.array([0.0, 1e-6, -1e-6, 2e-6])
    t, _ = two_sample_t(jitter, 1.0 + jitter)
    _expect(abs(t) > 1e3)


def run_selfcheck() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        try:
            fn()
        except Exception as exc:  # noqa: BLE001 - every failure is reported, not raised
            detail = str(exc) or type(exc).__name__
            logger.warning("selfcheck %r failed: %s", name, detail)
            results.append(CheckResult(name, False, detail))
        else:
            results.append(CheckResult(name, True))
    passed = sum(r.passed for r in results)
    logger.info("selfcheck: %d/%d passed", passed, len(results))
    return results
