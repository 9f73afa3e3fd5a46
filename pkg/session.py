"""
Per-invocation state shared by the CLI commands: the active field, the
truncation defaults, input loading, output and multi-file dispatch.
"""

import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import click

import config
from certificates import error_document
from errors import ToolkitError
from exactnum import RATIONALS, field_extend
from grammar import operator_from_json

logger = logging.getLogger(__name__)


@dataclass
class Session:
    minpoly: str = None
    prec: int = None
    depth: int = None
    inputs: list = field(default_factory=list)
    output: str = None
    jobs: int = 1

    @classmethod
    def from_config(cls, minpoly=None, prec=None, depth=None, output=None, jobs=None):
        return cls(
            minpoly=minpoly,
            prec=config.PRECISION if prec is None else prec,
            depth=config.DEPTH if depth is None else depth,
            output=output,
            jobs=config.JOBS if jobs is None else jobs,
        )

    @cached_property
    def field(self):
        """The single active scalar field."""
        return field_extend(self.minpoly) if self.minpoly else RATIONALS

    @property
    def domain(self):
        return self.field.domain

    def __getstate__(self):
        # worker processes rebuild the field from the minimal polynomial
        state = dict(self.__dict__)
        state.pop("field", None)
        return state

    def with_bounds(self, prec=None, depth=None):
        """Command-level flags override the session defaults."""
        return (self.prec if prec is None else prec, self.depth if depth is None else depth)


def read_document(source):
    """JSON document from a file, or operator text given inline or in a text file."""
    if os.path.isfile(source):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
        source_name = source
    else:
        text = source
        source_name = "<inline>"
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as e:
            raise click.BadParameter(f"{source_name}: invalid JSON ({e.msg} at line {e.lineno})")
    return {"text": stripped}


def load_operator(session, source):
    doc = read_document(source)
    return operator_from_json(doc, session.domain), doc


def emit(session, document):
    """Write one JSON document (or a list of them) to stdout or the output path."""
    text = json.dumps(document, indent=2, ensure_ascii=False)
    if session.output:
        with open(session.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        logger.info("wrote %s", session.output)
    else:
        click.echo(text)


def _guarded(task):
    worker, session, source, options = task
    try:
        return worker(session, source, **options)
    except ToolkitError as e:
        logger.warning("%s: %s", source, e.message)
        return e.exit_status, error_document(e)


def run_many(worker, session, sources, **options):
    """Run ``worker(session, source, **options) -> (status, document)`` per source.

    A single source runs in process and lets errors propagate to the error
    handler. Several sources run in a process pool; results keep input order.
    """
    if len(sources) == 1:
        return [worker(session, sources[0], **options)]
    tasks = [(worker, session, source, options) for source in sources]
    if session.jobs <= 1:
        return [_guarded(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=session.jobs) as pool:
        return list(pool.map(_guarded, tasks))


def finish(session, results):
    """Emit the documents and exit with the worst status."""
    documents = [doc for _, doc in results]
    emit(session, documents[0] if len(documents) == 1 else documents)
    status = max(status for status, _ in results)
    click.get_current_context().exit(status)
