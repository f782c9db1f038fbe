import click
from rich.table import Table

from ..config import settings
from ..core.ledger import list_runs
from .render import console, fmt


@click.command("history")
@click.option("--limit", type=click.IntRange(min=1), default=20, show_default=True)
def history_command(limit: int) -> None:
    """List recorded runs, newest first."""
    if not settings.database_url:
        console().print("run ledger disabled (FORESIGHT_DATABASE_URL is empty)")
        return

    runs = list_runs(settings.database_url, limit=limit)
    table = Table(title="Recorded runs")
    for column in ("id", "created", "source", "folds", "mean eps_1", "mean eps_t", "mean f_1", "output"):
        table.add_column(column)
    for run in runs:
        table.add_row(
            str(run.id),
            run.created_at.strftime("%Y-%m-%d %H:%M"),
            run.source,
            str(run.n_folds),
            fmt(run.mean_eps_1),
            fmt(run.mean_eps_t),
            fmt(run.mean_f_1),
            run.output_dir,
        )
    console().print(table)
