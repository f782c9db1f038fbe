"""rich tables shared by the commands."""
from __future__ import annotations

from typing import Optional, Sequence

from rich import box
from rich.console import Console
from rich.table import Table

from ..core.dual import EventForecast
from ..core.evaluation import REPORT_COLUMNS, STAT_COLUMNS, Aggregate, FoldReport


def fmt(value: Optional[float], digits: int = 3) -> str:
    if value is None:
        return "-"
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}f}"


def folds_table(reports: Sequence[FoldReport], summary: Aggregate) -> Table:
    table = Table(title="Rolling-window results", box=box.SIMPLE_HEAD)
    for column in REPORT_COLUMNS:
        table.add_column(column, justify="right")
    for report in reports:
        row = report.csv_row()
        table.add_row(*(fmt(row[c]) for c in REPORT_COLUMNS))

    means, deviations = summary.means(), summary.deviations()
    table.add_section()
    table.add_row("mean", *(fmt(means[c]) for c in STAT_COLUMNS), style="bold")
    table.add_row("dev", *(fmt(deviations[c]) for c in STAT_COLUMNS), style="dim")
    return table


def comparisons_table(summary: Aggregate) -> Table:
    table = Table(title="Independent-means t tests", box=box.SIMPLE_HEAD)
    for column in ("pair", "t", "df", "5% critical", "significant"):
        table.add_column(column, justify="right")
    for c in summary.comparisons:
        table.add_row(
            f"{c.a} vs {c.b}",
            fmt(c.t, 2),
            "-" if c.df is None else str(c.df),
            fmt(c.critical, 2),
            "yes" if c.significant else "no",
        )
    return table


def events_table(events: Sequence[EventForecast], title: str) -> Table:
    table = Table(title=title, box=box.SIMPLE_HEAD)
    for column in ("index", "actual", "forecast", "|error| forecast", "cell"):
        table.add_column(column, justify="right")
    for e in events:
        table.add_row(
            str(e.source_index),
            fmt(e.actual, 5),
            fmt(e.predicted_value, 5),
            fmt(e.predicted_abs_error, 5),
            str(e.cell),
        )
    return table


def console() -> Console:
    return Console()
