"""
Bispectral operator toolkit - command-line entry point

Subcommands live in ``commands/``; every module there exposes
``setup(group)`` and is discovered by listing the directory.

    python cli.py bessel --beta "-1,2"
    python cli.py classify --op samples/adler_moser.json
"""

import importlib
import logging
import os
import sys

import click

import config
from session import Session

logger = logging.getLogger(__name__)

COMMANDS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "commands")


class ToolkitGroup(click.Group):
    """Click group that hands command failures to registered error listeners."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.error_listeners = []

    def add_error_listener(self, listener):
        self.error_listeners.append(listener)

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except Exception as error:
            if not self.error_listeners:
                raise
            for listener in self.error_listeners:
                listener(ctx, error)
            raise


def configure_logging(verbose):
    level = getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)
    if verbose:
        level = min(level, logging.INFO if verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, format=config.LOG_FORMAT, stream=sys.stderr, force=True)


@click.group(cls=ToolkitGroup)
@click.option("--field", "minpoly", default=None, help="Minimal polynomial of the generator a, e.g. 'a^2 - 2'.")
@click.option("--prec", type=int, default=None, help="Default series precision.")
@click.option("--depth", type=int, default=None, help="Default pseudo-differential depth.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write JSON here instead of stdout.")
@click.option("-j", "--jobs", type=int, default=None, help="Worker processes for several input files.")
@click.option("-v", "--verbose", count=True, help="-v for milestones, -vv for per-step detail.")
@click.pass_context
def cli(ctx, minpoly, prec, depth, output, jobs, verbose):
    """Exact bispectral and Darboux computations on ordinary differential operators."""
    configure_logging(verbose)
    ctx.obj = Session.from_config(minpoly, prec, depth, output, jobs)


def load_commands(group):
    for file in sorted(os.listdir(COMMANDS_DIR)):
        if file.endswith(".py") and not file.startswith("_"):
            try:
                module = importlib.import_module(f"commands.{file[:-3]}")
                module.setup(group)
                logger.debug("✅ Loaded command module: %s", file[:-3])
            except Exception as e:
                logger.error("❌ Failed to load command module %s: %s", file, e)


load_commands(cli)


def main():
    cli(prog_name="bispectral")


if __name__ == "__main__":
    main()
