from pathlib import Path
from typing import Optional

import click
from pydantic import BaseModel, Field

from ..core.dual import EventForecast, classify_test_set, forecast_event
from ..core.errors import DataError, TooFewPatterns
from ..core.series import embed, latest_delay_vector, normalized_difference, read_series_csv
from ..integrations.artifacts import DUAL_MODEL_FILE, load_dual_model, write_events_csv
from .render import console, events_table


class ForecastRequest(BaseModel):
    model_dir: Path
    input: Path
    tail: int = Field(default=0, ge=0)
    out: Optional[Path] = None


def forecast_series(req: ForecastRequest) -> tuple[EventForecast, list[EventForecast]]:
    """
    The next out-of-sample event and the last `tail` in-sample events of the
    (transformed) input series, scored by a saved dual model.
    """
    if not (req.model_dir / DUAL_MODEL_FILE).exists():
        raise DataError(f"{req.model_dir} holds no {DUAL_MODEL_FILE}")
    model, doc = load_dual_model(req.model_dir)
    series = read_series_csv(req.input)
    if doc.transform == "normalized_difference":
        series = normalized_difference(series)

    x = latest_delay_vector(series, doc.m, doc.tau)
    upcoming = forecast_event(model, x, source_index=len(series) + 1)

    history: list[EventForecast] = []
    if req.tail:
        dataset = embed(series, doc.m, doc.tau)
        if req.tail > len(dataset):
            raise TooFewPatterns(
                f"--tail {req.tail} exceeds the {len(dataset)} patterns in {req.input}"
            )
        history = classify_test_set(model, dataset.take(range(len(dataset) - req.tail, len(dataset))))
    return upcoming, history


@click.command("forecast")
@click.option(
    "--model-dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    required=True,
    help="Directory of a saved dual model (e.g. <run>/models/fold_01).",
)
@click.option(
    "--input",
    "input_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="Series CSV, untransformed.",
)
@click.option("--tail", type=click.IntRange(min=0), default=0, show_default=True,
              help="Also score the last K events of the input.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the events as CSV.")
def forecast_command(model_dir: Path, input_path: Path, tail: int, out: Optional[Path]) -> None:
    """Forecast the next event of a series and its predictability cell."""
    req = ForecastRequest(model_dir=model_dir, input=input_path, tail=tail, out=out)
    upcoming, history = forecast_series(req)

    events = [*history, upcoming]
    if req.out is not None:
        write_events_csv(events, req.out)

    con = console()
    if history:
        con.print(events_table(history, f"Last {len(history)} events"))
    con.print(events_table([upcoming], "Next event"))
    con.print(
        f"next event is in cell {upcoming.cell}"
        + (" (error forecast clamped at 0)" if upcoming.clamped else "")
    )
