import click
from rich.table import Table

from ..core.selfcheck import run_selfcheck
from .render import console


@click.command("selfcheck")
@click.pass_context
def selfcheck_command(ctx: click.Context) -> None:
    """Run the built-in sanity cases; exits 1 on any failure."""
    results = run_selfcheck()

    table = Table(title="selfcheck")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    for r in results:
        table.add_row(r.name, "ok" if r.passed else "FAIL", r.detail)
    console().print(table)

    if not all(r.passed for r in results):
        ctx.exit(1)
