"""PSTAE command-line interface."""

import logging
from pathlib import Path  # noqa: TC003 — typer needs runtime Path
from typing import Annotated

import typer

from pcv_data.background import BackgroundWindow
from pcv_data.formats import PCV1_VERSION
from pstae import __version__
from pstae.cli.common import LOG_FORMAT, CliState, command_errors
from pstae.cli.data import gen_data, ingest
from pstae.cli.experiments import evaluate, heatmap_command, score, sweep_f
from pstae.cli.models import arch_dump, pretrain, train
from pstae.config import SmoothOrder, load_run_config
from pstae_core.checkpoint import PSTW_VERSION
from pstnet.config import ModelConfig

app = typer.Typer(
    name="pstae",
    help="Point-cloud video anomaly detection with a point spatio-temporal autoencoder",
    no_args_is_help=True,
)

app.command("gen-data")(gen_data)
app.command("ingest")(ingest)
app.command("pretrain")(pretrain)
app.command("train")(train)
app.command("arch-dump")(arch_dump)
app.command("score")(score)
app.command("eval")(evaluate)
app.command("heatmap")(heatmap_command)
app.command("sweep-f")(sweep_f)


def _version_callback(value: bool) -> None:
    if value:
        typer.echo(f"pstae {__version__} (PCV1 v{PCV1_VERSION}, PSTW v{PSTW_VERSION})")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    config: Annotated[
        Path | None, typer.Option("--config", "-c", help="TOML, JSON or YAML run config")
    ] = None,
    descriptor_dim: Annotated[
        int | None, typer.Option("--f", help="Local descriptor width (4, 8, 16, 32)")
    ] = None,
    bg_window: Annotated[
        BackgroundWindow | None, typer.Option("--bg-window", help="Background window mode")
    ] = None,
    smooth_order: Annotated[
        SmoothOrder | None, typer.Option("--smooth-order", help="Smoothing vs normalization")
    ] = None,
    seed: Annotated[int | None, typer.Option("--seed", help="Override the run seed")] = None,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Debug logging")] = False,
    version: Annotated[
        bool,
        typer.Option("--version", callback=_version_callback, is_eager=True, help="Show versions"),
    ] = False,
) -> None:
    """PSTAE CLI."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format=LOG_FORMAT)
    with command_errors("config"):
        run = load_run_config(config, seed=seed)
        if descriptor_dim is not None:
            network = ModelConfig.model_validate(
                {**run.network.model_dump(), "descriptor_dim": descriptor_dim}
            )
            run = run.model_copy(update={"network": network})
        if bg_window is not None:
            bgsub = run.bgsub.model_copy(update={"window": bg_window})
            run = run.model_copy(update={"bgsub": bgsub})
        if smooth_order is not None:
            scoring = run.scoring.model_copy(update={"smooth_order": smooth_order})
            run = run.model_copy(update={"scoring": scoring})
    ctx.obj = CliState(config=run)


if __name__ == "__main__":
    app()
