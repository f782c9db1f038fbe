"""
Time-series container, delay embedding, the normalized-difference transform,
rolling train/test windows and CSV ingestion.

Indices exposed to callers (source_indices, window ranges, error messages) are
1-based; arrays are 0-based internally.
"""
from __future__ import annotations

import codecs
import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import CsvFormatError, DegenerateDifference, SeriesTooShort


class Predictability(str, Enum):
    MORE = "MorePredictable"
    LESS = "LessPredictable"
    UNDEFINED = "Undefined"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    labels: Optional[tuple[Predictability, ...]] = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("a time series needs at least one value")
        if not np.all(np.isfinite(values)):
            raise ValueError("time series values must be finite")
        object.__setattr__(self, "values", _frozen(values))

        if self.labels is not None:
            labels = tuple(Predictability(lbl) for lbl in self.labels)
            if len(labels) != values.size:
                raise ValueError(
                    f"{len(labels)} labels for {values.size} values"
                )
            object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class EmbeddedDataset:
    """
    Delay vectors paired with next-step targets.

    `source_indices[k]` is the 1-based position of `targets[k]` in the source
    series. `labels`, when present, are the labels of the target points.
    """

    inputs: np.ndarray
    targets: np.ndarray
    source_indices: np.ndarray
    m: int
    tau: int
    labels: Optional[tuple[Predictability, ...]] = field(default=None)

    def __post_init__(self) -> None:
        inputs = np.array(self.inputs, dtype=float).reshape(-1, self.m)
        targets = np.array(self.targets, dtype=float).reshape(-1)
        indices = np.array(self.source_indices, dtype=np.int64).reshape(-1)
        if not (len(inputs) == len(targets) == len(indices)):
            raise ValueError("inputs, targets and source_indices differ in length")
        if indices.size > 1 and np.any(np.diff(indices) <= 0):
            raise ValueError("source_indices must be strictly increasing")
        if self.labels is not None and len(self.labels) != len(targets):
            raise ValueError("labels and targets differ in length")
        object.__setattr__(self, "inputs", _frozen(inputs))
        object.__setattr__(self, "targets", _frozen(targets))
        object.__setattr__(self, "source_indices", _frozen(indices))

    def __len__(self) -> int:
        return int(self.targets.size)

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def take(self, positions: Sequence[int] | np.ndarray) -> "EmbeddedDataset":
        """Sub-dataset of the given pattern positions (kept in their given order)."""
        positions = np.asarray(positions, dtype=np.int64)
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[int(p)] for p in positions)
        return EmbeddedDataset(
            inputs=self.inputs[positions],
            targets=self.targets[positions],
            source_indices=self.source_indices[positions],
            m=self.m,
            tau=self.tau,
            labels=labels,
        )

    def with_targets(self, targets: np.ndarray) -> "EmbeddedDataset":
        """Same inputs and indices, new targets (used for the error model)."""
        return EmbeddedDataset(
            inputs=self.inputs,
            targets=targets,
            source_indices=self.source_indices,
            m=self.m,
            tau=self.tau,
            labels=self.labels,
        )

    def select_window(
        self, start: int, stop: int, *, causal: bool
    ) -> "EmbeddedDataset":
        """
        Patterns whose target lies in the 1-based inclusive range [start, stop].

        With `causal=True` a pattern is also dropped when its oldest delayed
        input falls before `start`.
        """
        idx = self.source_indices
        mask = (idx >= start) & (idx <= stop)
        if causal:
            oldest_input = idx - 1 - (self.m - 1) * self.tau
            mask &= oldest_input >= start
        return self.take(np.flatnonzero(mask))

    def source_positions_valid(self, series: TimeSeries) -> bool:
        """True when every target is recovered exactly from source_indices."""
        return bool(
            np.array_equal(series.values[self.source_indices - 1], self.targets)
        )


def min_length(m: int, tau: int) -> int:
    return (m - 1) * tau + 2


def embed(series: TimeSeries, m: int, tau: int) -> EmbeddedDataset:
    """
    Input (x_i, x_{i-tau}, ..., x_{i-(m-1)tau}) with target x_{i+1}, for every i
    with enough history. `m` counts all inputs, x_i included.
    """
    if m < 1 or tau < 1:
        raise ValueError("m and tau must be positive")
    n = len(series)
    required = min_length(m, tau)
    if n < required:
        raise SeriesTooShort(n, required)

    x = series.values
    first = (m - 1) * tau
    current = np.arange(first, n - 1)
    lags = np.arange(m) * tau
    inputs = x[current[:, None] - lags[None, :]]
    targets = x[current + 1]
    source_indices = current + 2

    labels = None
    if series.labels is not None:
        labels = tuple(series.labels[i + 1] for i in current)

    return EmbeddedDataset(
        inputs=inputs,
        targets=targets,
        source_indices=source_indices,
        m=m,
        tau=tau,
        labels=labels,
    )


def latest_delay_vector(series: TimeSeries, m: int, tau: int) -> np.ndarray:
    """Delay vector ending at the last observation: input of the next event."""
    n = len(series)
    if n < (m - 1) * tau + 1:
        raise SeriesTooShort(n, (m - 1) * tau + 1)
    last = n - 1
    return series.values[last - np.arange(m) * tau].copy()


def normalized_difference(raw: TimeSeries) -> TimeSeries:
    """x_i = 2 (y_i - y_{i-1}) / (y_i + y_{i-1}); labels are dropped."""
    if len(raw) < 2:
        raise SeriesTooShort(len(raw), 2)
    y = raw.values
    denominator = y[1:] + y[:-1]
    zero = np.flatnonzero(denominator == 0.0)
    if zero.size:
        raise DegenerateDifference(int(zero[0]) + 2)
    return TimeSeries(values=2.0 * (y[1:] - y[:-1]) / denominator)


@dataclass(frozen=True)
class Window:
    """1-based inclusive train and test ranges."""

    train: tuple[int, int]
    test: tuple[int, int]


def rolling_windows(
    series_length: int, train_size: int, test_size: int, step: int
) -> list[Window]:
    if step < 1:
        raise ValueError("step must be >= 1")
    if train_size < 1 or test_size < 1:
        raise ValueError("train_size and test_size must be >= 1")

    windows: list[Window] = []
    offset = 0
    while offset + train_size + test_size <= series_length:
        train = (offset + 1, offset + train_size)
        test = (offset + train_size + 1, offset + train_size + test_size)
        windows.append(Window(train=train, test=test))
        offset += step
    return windows


# ---------- CSV ----------


def _parse_float(text: str) -> Optional[float]:
    try:
        value = float(text.strip())
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _looks_numeric(text: str) -> bool:
    try:
        float(text.strip())
    except ValueError:
        return False
    return True


def _decoded_lines(path: str) -> list[str]:
    """File lines as text, BOM stripped; undecodable bytes abort with their line."""
    raw = Path(path).read_bytes()
    if raw.startswith(codecs.BOM_UTF8):
        raw = raw[len(codecs.BOM_UTF8) :]
    lines = []
    for line_no, chunk in enumerate(raw.splitlines(keepends=True), start=1):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError:
            raise CsvFormatError(path, line_no, "invalid UTF-8") from None
    return lines


def read_series_csv(path: str | Path) -> TimeSeries:
    """
    Read a series from UTF-8 CSV; a leading byte-order mark is ignored.

    Accepted shapes: a single numeric column; `date,value`; or any file whose
    header row names a `value` column (and optionally a `label` column).
    Blank lines are ignored. The first non-blank line is a header when its value
    field does not parse; any later unparsable value aborts with its line number.
    """
    path = str(path)
    value_col: Optional[int] = None
    label_col: Optional[int] = None
    values: list[float] = []
    labels: list[Predictability] = []
    seen_record = False

    reader = csv.reader(_decoded_lines(path))
    for row in reader:
        line_no = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue

        if not seen_record:
            seen_record = True
            header = [cell.strip().lower() for cell in row]
            if "value" in header:
                value_col = header.index("value")
                label_col = header.index("label") if "label" in header else None
                continue
            value_col = 0 if len(row) == 1 else 1
            if not _looks_numeric(row[value_col]):
                # header without a recognised column name
                continue

        assert value_col is not None
        if value_col >= len(row):
            raise CsvFormatError(path, line_no, "missing value column")
        value = _parse_float(row[value_col])
        if value is None:
            raise CsvFormatError(
                path, line_no, f"cannot parse value {row[value_col]!r}"
            )
        values.append(value)

        if label_col is not None:
            raw_label = row[label_col].strip() if label_col < len(row) else ""
            try:
                labels.append(Predictability(raw_label))
            except ValueError:
                raise CsvFormatError(
                    path, line_no, f"unknown label {raw_label!r}"
                ) from None

    if not values:
        raise CsvFormatError(path, 0, "no data rows")
    return TimeSeries(
        values=np.array(values),
        labels=tuple(labels) if label_col is not None else None,
    )


def write_series_csv(series: TimeSeries, path: str | Path) -> None:
    """Write `index,value,label` rows (1-based index)."""

    labels: Iterable[str]
    if series.labels is None:
        labels = [Predictability.UNDEFINED.value] * len(series)
    else:
        labels = [lbl.value for lbl in series.labels]
    frame = pd.DataFrame(
        {
            "index": np.arange(1, len(series) + 1),
            "value": series.values,
            "label": list(labels),
        }
    )
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
