"""
Per-fold statistics (normalized RMSE, label fractions, U statistic, sign hits,
error-forecast correlations) and their aggregation over folds.

Standard deviations inside a fold use the population convention (divide by N).
The dispersion reported across folds uses the sample convention (N - 1).
"""
from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy import stats

from .dual import DualModel, EventForecast, classify_test_set, in_sample_residuals
from .errors import (
    DegenerateCorrelation,
    DegenerateSamples,
    DegenerateTestSet,
    ForesightError,
    MissingLabels,
)
from .series import EmbeddedDataset, Predictability

logger = logging.getLogger(__name__)


def _pair(actuals: Sequence[float], predictions: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actuals, dtype=float).reshape(-1)
    p = np.asarray(predictions, dtype=float).reshape(-1)
    if a.size != p.size:
        raise ValueError(f"{a.size} actuals vs {p.size} predictions")
    if a.size == 0:
        raise DegenerateTestSet("no events to score")
    return a, p


def rmse(actuals: Sequence[float], predictions: Sequence[float]) -> float:
    a, p = _pair(actuals, predictions)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def normalized_rmse(
    actuals: Sequence[float], predictions: Sequence[float], whole_test_std: float
) -> float:
    """RMSE divided by the std of the WHOLE test sample, also for cell subsets."""
    if not whole_test_std > 0.0:
        raise DegenerateTestSet("test sample has zero dispersion")
    return rmse(actuals, predictions) / whole_test_std


def u_statistic(actuals: Sequence[float], predictions: Sequence[float]) -> float:
    """Model RMSE over the RMSE of the zero-change forecast on the same events."""
    a, p = _pair(actuals, predictions)
    baseline = float(np.sqrt(np.mean(a * a)))
    if baseline == 0.0:
        raise DegenerateTestSet("all actual changes are zero")
    return rmse(a, p) / baseline


def sign_fraction(actuals: Sequence[float], predictions: Sequence[float]) -> float:
    """Share of events whose direction is forecast correctly; zeros count as misses."""
    a, p = _pair(actuals, predictions)
    return float(np.mean(a * p > 0.0))


def label_fraction(labels: Sequence[Optional[Predictability]]) -> float:
    if len(labels) == 0:
        raise MissingLabels("no events to take a label fraction of")
    if any(lbl is None or lbl == Predictability.UNDEFINED for lbl in labels):
        raise MissingLabels("an event has no ground-truth predictability label")
    return sum(lbl == Predictability.MORE for lbl in labels) / len(labels)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float).reshape(-1)
    y = np.asarray(ys, dtype=float).reshape(-1)
    if x.size != y.size or x.size < 2:
        raise DegenerateCorrelation("need two equally long samples of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateCorrelation("a sample has zero variance")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def two_sample_t(
    sample_a: Sequence[float], sample_b: Sequence[float]
) -> tuple[float, int]:
    """Pooled-variance independent-means t statistic and its degrees of freedom."""
    a = np.asarray(sample_a, dtype=float).reshape(-1)
    b = np.asarray(sample_b, dtype=float).reshape(-1)
    if a.size < 2 or b.size < 2:
        raise DegenerateSamples("each sample needs at least two values")
    df = a.size + b.size - 2
    pooled = (np.sum((a - a.mean()) ** 2) + np.sum((b - b.mean()) ** 2)) / df
    diff = float(a.mean() - b.mean())
    if pooled == 0.0:
        if diff == 0.0:
            return 0.0, df
        raise DegenerateSamples("both samples are constant with different means")
    se = math.sqrt(pooled * (1.0 / a.size + 1.0 / b.size))
    return diff / se, df


def critical_t(df: int, alpha: float = 0.05) -> float:
    """Two-sided critical value of Student's t."""
    return float(stats.t.ppf(1.0 - alpha / 2.0, df))


# ---------- Fold report ----------


class CellStats(BaseModel):
    cell: int
    n: int
    eps: Optional[float] = None
    f: Optional[float] = None


class FoldReport(BaseModel):
    fold: int = 0
    eps_1: Optional[float] = None
    eps_2: Optional[float] = None
    eps_t: float
    u_1: Optional[float] = None
    u_2: Optional[float] = None
    u_t: Optional[float] = None
    s_1: Optional[float] = None
    s_2: Optional[float] = None
    s_t: Optional[float] = None
    f_1: Optional[float] = None
    f_2: Optional[float] = None
    f_t: Optional[float] = None
    n_1: int
    n_2: int
    rho_tr: Optional[float] = None
    rho_pr: Optional[float] = None
    cells: list[CellStats] = []

    def csv_row(self) -> dict[str, Optional[float]]:
        return {column: getattr(self, column) for column in REPORT_COLUMNS}


# Column order of the tabular report
REPORT_COLUMNS: tuple[str, ...] = (
    "fold",
    "eps_1", "eps_2", "eps_t",
    "u_1", "u_2", "u_t",
    "s_1", "s_2", "s_t",
    "f_1", "f_2", "f_t",
    "n_1", "n_2",
    "rho_tr", "rho_pr",
)

STAT_COLUMNS: tuple[str, ...] = REPORT_COLUMNS[1:]


class ReportOptions(BaseModel):
    price_statistics: bool = False


def _optional(fn, *args) -> Optional[float]:
    try:
        return fn(*args)
    except ForesightError as exc:
        logger.warning("statistic unavailable: %s", exc)
        return None


def training_residual_pairs(
    model: DualModel, train: EmbeddedDataset
) -> tuple[np.ndarray, np.ndarray]:
    """(actual |residual| of the value ensemble, error-model fit) on the training set."""
    actual = in_sample_residuals(model.value_model, train)
    fitted = np.maximum(model.error_model.predict_batch(train.inputs), 0.0)
    return actual, fitted


def fold_report(
    model: DualModel,
    test: EmbeddedDataset,
    train_residual_pairs: tuple[np.ndarray, np.ndarray],
    options: Optional[ReportOptions] = None,
    *,
    events: Optional[Sequence[EventForecast]] = None,
    fold: int = 0,
) -> FoldReport:
    """
    Statistics for one rolling window. "1" is cell 1; "2" is every other cell,
    which for two cells is simply cell 2.
    """
    if len(test) == 0:
        raise DegenerateTestSet("test set is empty")
    options = options or ReportOptions()
    if events is None:
        events = classify_test_set(model, test)

    actual = test.targets
    predicted = np.array([e.predicted_value for e in events])
    cells = np.array([e.cell for e in events])
    whole_std = float(np.std(actual))
    first = cells == 1
    rest = ~first

    def eps(mask: np.ndarray) -> Optional[float]:
        if not mask.any():
            return None
        return normalized_rmse(actual[mask], predicted[mask], whole_std)

    eps_t = normalized_rmse(actual, predicted, whole_std)

    labels = list(test.labels) if test.labels is not None else None
    labelled = labels is not None and all(
        lbl != Predictability.UNDEFINED for lbl in labels
    )

    def frac(mask: np.ndarray) -> Optional[float]:
        if not labelled or not mask.any():
            return None
        return label_fraction([labels[i] for i in np.flatnonzero(mask)])

    def price(fn, mask: np.ndarray) -> Optional[float]:
        if not options.price_statistics or not mask.any():
            return None
        return _optional(fn, actual[mask], predicted[mask])

    everything = np.ones_like(first)
    predicted_err = np.array([e.predicted_abs_error for e in events])
    actual_err = np.abs(actual - predicted)

    per_cell = []
    for cell in range(1, model.n_cells + 1):
        mask = cells == cell
        per_cell.append(
            CellStats(cell=cell, n=int(mask.sum()), eps=eps(mask), f=frac(mask))
        )

    return FoldReport(
        fold=fold,
        eps_1=eps(first),
        eps_2=eps(rest),
        eps_t=eps_t,
        u_1=price(u_statistic, first),
        u_2=price(u_statistic, rest),
        u_t=price(u_statistic, everything),
        s_1=price(sign_fraction, first),
        s_2=price(sign_fraction, rest),
        s_t=price(sign_fraction, everything),
        f_1=frac(first),
        f_2=frac(rest),
        f_t=frac(everything),
        n_1=int(first.sum()),
        n_2=int(rest.sum()),
        rho_tr=_optional(pearson, *train_residual_pairs),
        rho_pr=_optional(pearson, actual_err, predicted_err),
        cells=per_cell,
    )


# ---------- Aggregation over folds ----------


class ColumnSummary(BaseModel):
    column: str
    mean: Optional[float] = None
    deviation: Optional[float] = None
    count: int = 0


class Comparison(BaseModel):
    a: str
    b: str
    t: Optional[float] = None
    df: Optional[int] = None
    critical: Optional[float] = None

    @property
    def significant(self) -> bool:
        return self.t is not None and self.critical is not None and abs(self.t) > self.critical


class Aggregate(BaseModel):
    columns: list[ColumnSummary]
    comparisons: list[Comparison]

    def means(self) -> dict[str, Optional[float]]:
        return {c.column: c.mean for c in self.columns}

    def deviations(self) -> dict[str, Optional[float]]:
        return {c.column: c.deviation for c in self.columns}


COMPARED_PAIRS: tuple[tuple[str, str], ...] = (
    ("eps_1", "eps_t"),
    ("eps_1", "eps_2"),
    ("f_1", "f_t"),
    ("f_1", "f_2"),
    ("u_1", "u_t"),
    ("u_1", "u_2"),
    ("s_1", "s_t"),
    ("s_1", "s_2"),
)


def _column(reports: Sequence[FoldReport], name: str) -> np.ndarray:
    values = [getattr(r, name) for r in reports]
    return np.array([v for v in values if v is not None], dtype=float)


def aggregate(reports: Sequence[FoldReport]) -> Aggregate:
    """Mean and root squared dispersion per column, plus independent-means t tests."""
    columns = []
    for name in STAT_COLUMNS:
        values = _column(reports, name)
        columns.append(
            ColumnSummary(
                column=name,
                mean=float(values.mean()) if values.size else None,
                deviation=float(values.std(ddof=1)) if values.size > 1 else None,
                count=int(values.size),
            )
        )

    comparisons = []
    for a_name, b_name in COMPARED_PAIRS:
        comparison = Comparison(a=a_name, b=b_name)
        a, b = _column(reports, a_name), _column(reports, b_name)
        if a.size >= 2 and b.size >= 2:
            try:
                t, df = two_sample_t(a, b)
                comparison = Comparison(
                    a=a_name, b=b_name, t=t, df=df, critical=critical_t(df)
                )
            except DegenerateSamples as exc:
                logger.warning("t test %s vs %s unavailable: %s", a_name, b_name, exc)
        comparisons.append(comparison)
    return Aggregate(columns=columns, comparisons=comparisons)
