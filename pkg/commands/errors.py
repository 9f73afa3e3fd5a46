"""
Errors - global error handling for commands
"""
import json
import logging

import click

from certificates import error_document
from errors import COMPUTATION_ERROR, ToolkitError

logger = logging.getLogger(__name__)


def on_command_error(ctx, error):
    """Turn toolkit errors into a JSON error document and the mapped exit status."""
    if isinstance(error, ToolkitError):
        click.echo(json.dumps(error_document(error), indent=2, ensure_ascii=False))
        click.echo(f"❌ Error: {error.code}: {error.message}", err=True)
        ctx.exit(error.exit_status)
    logger.exception("unexpected failure: %s", error)
    click.echo(f"❌ Error: {error}", err=True)
    ctx.exit(COMPUTATION_ERROR)


def setup(group):
    group.add_error_listener(on_command_error)
