import logging
import sys

import click

from . import __version__
from .cli.commands_forecast import forecast_command
from .cli.commands_generate import generate_command
from .cli.commands_history import history_command
from .cli.commands_run import run_command
from .cli.commands_selfcheck import selfcheck_command
from .config import configure_logging, settings
from .core.errors import ConfigError, ForesightError

logger = logging.getLogger("foresight")


class ForesightGroup(click.Group):
    """Turns library errors into one-line messages and their exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = ConfigError.exit_code
            raise
        except ForesightError as exc:
            if logger.isEnabledFor(logging.DEBUG):
                logger.exception("command failed")
            click.echo(f"error: {exc}", err=True)
            ctx.exit(exc.exit_code)


@click.group(cls=ForesightGroup)
@click.version_option(__version__, prog_name="foresight")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Overrides FORESIGHT_LOG_LEVEL.",
)
def cli(log_level: str | None) -> None:
    """Dual-network forecasts of values and of their own errors."""
    configure_logging(log_level or settings.log_level)


cli.add_command(generate_command)
cli.add_command(run_command)
cli.add_command(forecast_command)
cli.add_command(selfcheck_command)
cli.add_command(history_command)


def main() -> None:
    try:
        code = cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(ConfigError.exit_code)
    sys.exit(code or 0)
