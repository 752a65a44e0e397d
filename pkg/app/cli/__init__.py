import click
from flask.cli import AppGroup, FlaskGroup

from app.errors import EXIT_USAGE


class _UsageExitMixin:
    """Report click usage errors with the simulator's usage exit code (1, not click's 2)."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_USAGE
            raise


class SimGroup(_UsageExitMixin, AppGroup):
    pass


class SimFlaskGroup(_UsageExitMixin, FlaskGroup):
    pass


sim_cli = SimGroup("sim", help="Entanglement-swapping simulations (sweeps, figures, truncation checks).")

from app.cli import commands  # noqa: E402, F401
