"""State and error handling shared by every subcommand."""

import contextlib
import json
import logging
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

import typer
from pydantic import BaseModel
from rich.console import Console

from pstae.config import RunConfig
from pstae_core.errors import PstaeError

console = Console()
logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


@dataclass
class CliState:
    config: RunConfig


def run_config(ctx: typer.Context) -> RunConfig:
    state = ctx.find_object(CliState)
    if state is None:
        # Commands invoked without the app callback (tests calling functions directly).
        return RunConfig()
    return state.config


def error_payload(command: str, exc: BaseException) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc), "command": command})


@contextlib.contextmanager
def command_errors(command: str) -> Iterator[None]:
    """Report any expected failure as one JSON object on stderr and exit 1."""
    try:
        yield
    except (PstaeError, ValueError, LookupError, OSError) as exc:
        logger.debug("%s failed", command, exc_info=True)
        typer.echo(error_payload(command, exc), err=True)
        raise typer.Exit(1) from None


def write_json(path: Path, model: BaseModel) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
    console.print(f"[green]✓[/green] Wrote [cyan]{path}[/cyan]")
