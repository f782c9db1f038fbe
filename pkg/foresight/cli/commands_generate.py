from pathlib import Path

import click
from pydantic import BaseModel, Field

from ..core.generators import generate
from ..core.series import Predictability, write_series_csv
from .render import console


class GenerateRequest(BaseModel):
    model: int = Field(ge=1, le=3)
    length: int = Field(ge=3)
    seed: int = Field(ge=0)
    out: Path


@click.command("generate")
@click.option("--model", type=click.IntRange(1, 3), required=True, help="Benchmark model 1, 2 or 3.")
@click.option("--length", type=click.IntRange(min=3), required=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    required=True,
    help="Destination CSV (index,value,label).",
)
def generate_command(model: int, length: int, seed: int, out: Path) -> None:
    """Write a labelled synthetic series as CSV."""
    req = GenerateRequest(model=model, length=length, seed=seed, out=out)
    series = generate(req.model, req.length, req.seed)
    req.out.parent.mkdir(parents=True, exist_ok=True)
    write_series_csv(series, req.out)

    labels = series.labels or ()
    more = sum(lbl == Predictability.MORE for lbl in labels)
    defined = sum(lbl != Predictability.UNDEFINED for lbl in labels)
    share = more / defined if defined else 0.0
    console().print(
        f"model {req.model}: {req.length} points -> {req.out} "
        f"({share:.1%} MorePredictable)"
    )
