"""
Downhill simplex (Nelder-Mead / polytope) minimizer.

Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
Stops when the relative spread of vertex costs,
    2 |f_worst - f_best| / (|f_worst| + |f_best| + TINY),
drops below `ftol`, or after `max_iterations` iterations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

REFLECT = 1.0
EXPAND = 2.0
CONTRACT = 0.5
SHRINK = 0.5
TINY = 1e-10

CostFn = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class TracePoint:
    iteration: int
    vertex: np.ndarray
    cost: float


@dataclass
class SimplexResult:
    best: np.ndarray
    best_cost: float
    iterations: int
    converged: bool
    trace: list[TracePoint] = field(default_factory=list)


def _safe(cost_fn: CostFn) -> CostFn:
    def wrapped(x: np.ndarray) -> float:
        value = float(cost_fn(x))
        return value if math.isfinite(value) else math.inf

    return wrapped


def initial_simplex(start: np.ndarray) -> np.ndarray:
    """Start vertex plus one vertex per coordinate, offset by max(0.1, 0.1|x_k|)."""
    n = start.size
    simplex = np.tile(start, (n + 1, 1))
    for k in range(n):
        simplex[k + 1, k] += max(0.1, 0.1 * abs(start[k]))
    return simplex


def _spread(f_best: float, f_worst: float) -> float:
    if math.isinf(f_worst):
        return math.inf
    return 2.0 * abs(f_worst - f_best) / (abs(f_worst) + abs(f_best) + TINY)


def nelder_mead(
    cost_fn: CostFn,
    start: np.ndarray,
    *,
    max_iterations: int = 5000,
    ftol: float = 1e-8,
) -> SimplexResult:
    """
    Minimize `cost_fn` from `start`. Non-finite costs count as +inf.

    `trace` holds the best vertex after every iteration, starting with
    iteration 0 (the initial simplex), so its costs never increase.
    """
    start = np.asarray(start, dtype=float).reshape(-1)
    if not np.all(np.isfinite(start)):
        raise ValueError("start vector must be finite")
    f = _safe(cost_fn)

    sim = initial_simplex(start)
    fsim = np.array([f(v) for v in sim])
    order = np.argsort(fsim, kind="stable")
    sim, fsim = sim[order], fsim[order]

    trace = [TracePoint(0, sim[0].copy(), float(fsim[0]))]
    n = start.size
    iterations = 0
    converged = False

    while iterations < max_iterations:
        if _spread(fsim[0], fsim[-1]) < ftol:
            converged = True
            break
        iterations += 1

        centroid = sim[:-1].mean(axis=0)
        worst = sim[-1]

        xr = centroid + REFLECT * (centroid - worst)
        fr = f(xr)
        shrink = False

        if fr < fsim[0]:
            xe = centroid + EXPAND * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                sim[-1], fsim[-1] = xe, fe
            else:
                sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
        elif fr < fsim[-1]:
            # outside contraction
            xc = centroid + CONTRACT * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                sim[-1], fsim[-1] = xc, fc
            else:
                shrink = True
        else:
            # inside contraction
            xc = centroid + CONTRACT * (worst - centroid)
            fc = f(xc)
            if fc < fsim[-1]:
                sim[-1], fsim[-1] = xc, fc
            else:
                shrink = True

        if shrink:
            for j in range(1, n + 1):
                sim[j] = sim[0] + SHRINK * (sim[j] - sim[0])
                fsim[j] = f(sim[j])

        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        trace.append(TracePoint(iterations, sim[0].copy(), float(fsim[0])))

    return SimplexResult(
        best=sim[0].copy(),
        best_cost=float(fsim[0]),
        iterations=iterations,
        converged=converged,
        trace=trace,
    )
