from pathlib import Path
from typing import Optional

import click

from ..config import settings
from ..core.experiment import load_config, run_experiment
from .render import comparisons_table, console, folds_table


@click.command("run")
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    required=True,
    help="JSON experiment config; omitted fields take the defaults.",
)
@click.option(
    "--output-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Overrides output_dir from the config.",
)
@click.option(
    "--workers",
    type=click.IntRange(min=1),
    default=None,
    help="Parallel fold processes (default from FORESIGHT_WORKERS).",
)
@click.option("--no-ledger", is_flag=True, help="Do not record the run in the ledger.")
def run_command(
    config_path: Path,
    output_dir: Optional[Path],
    workers: Optional[int],
    no_ledger: bool,
) -> None:
    """Run the rolling-window experiment described by a config file."""
    config = load_config(config_path)
    target = output_dir or config.output_dir or Path(settings.output_root) / config.source
    ledger_url = None if no_ledger else (settings.database_url or None)

    result = run_experiment(
        config,
        workers=workers or settings.workers,
        output_dir=target,
        ledger_url=ledger_url,
    )

    out = console()
    out.print(folds_table(result.reports, result.summary))
    out.print(comparisons_table(result.summary))
    out.print(f"artifacts: {target}")
