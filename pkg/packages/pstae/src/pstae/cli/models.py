"""Model commands: extractor pretraining, autoencoder training, architecture dump."""

from pathlib import Path  # noqa: TC003 — typer needs runtime Path
from typing import Annotated

import typer
from rich.panel import Panel
from rich.table import Table

from pstae.cli.common import command_errors, console, run_config, write_json
from pstae.pipeline import run_pretrain, run_train
from pstnet.network import architecture


def pretrain(ctx: typer.Context) -> None:
    """Pretrain the shallow extractor on the action clips, then freeze and save it."""
    config = run_config(ctx)
    f = config.network.descriptor_dim
    console.print(Panel.fit(f"Pretraining extractor (f={f})", style="bold blue"))
    with command_errors("pretrain"):
        with console.status("[bold green]Training extractor + action head..."):
            result = run_pretrain(config)
        write_json(config.data.runs / f"pretrain_f{f}.json", result.report)
    console.print(f"  Train accuracy: [cyan]{result.accuracy:.3f}[/cyan]")
    console.print(f"[green]✓[/green] Extractor saved to [cyan]{config.extractor_path}[/cyan]")


def train(ctx: typer.Context) -> None:
    """Train the PSTAE on normal training videos with the frozen extractor."""
    config = run_config(ctx)
    f = config.network.descriptor_dim
    console.print(Panel.fit(f"Training PSTAE (f={f})", style="bold blue"))
    with command_errors("train"):
        with console.status("[bold green]Training autoencoder..."):
            report = run_train(config)
        write_json(config.data.runs / f"train_f{f}.json", report)

    table = Table()
    table.add_column("Epoch", justify="right", style="cyan")
    table.add_column("Mean loss", justify="right")
    table.add_column("LR", justify="right")
    table.add_column("Seconds", justify="right")
    for epoch in report.epochs:
        table.add_row(
            str(epoch.epoch),
            f"{epoch.mean_loss:.6g}",
            f"{epoch.learning_rate:g}",
            f"{epoch.wall_seconds:.1f}",
        )
    console.print(table)


def arch_dump(
    ctx: typer.Context,
    json_path: Annotated[
        Path | None, typer.Option("--json", help="Also write the report as JSON")
    ] = None,
) -> None:
    """Print per-layer shapes and parameter counts for the configured network."""
    config = run_config(ctx)
    with command_errors("arch-dump"):
        report = architecture(config.network)
        if json_path is not None:
            write_json(json_path, report)

    table = Table(title=f"f={report.descriptor_dim}, M={report.num_points}, L={report.clip_length}")
    table.add_column("Layer", style="cyan")
    table.add_column("Kind")
    table.add_column("r_s / s_s / c_s", justify="right")
    table.add_column("r_t / s_t / c_t / p_t", justify="right")
    table.add_column("In (T, N, C)", justify="right")
    table.add_column("Out (T, N, C)", justify="right")
    table.add_column("Params", justify="right")
    for layer in report.layers:
        cfg = layer.config
        spatial = f"{cfg.r_s if cfg.r_s is not None else '-'} / {cfg.s_s or '-'} / {cfg.c_s}"
        temporal = f"{cfg.r_t} / {cfg.s_t} / {cfg.c_t} / {list(cfg.p_t)}"
        table.add_row(
            layer.name,
            layer.kind.value,
            spatial,
            temporal,
            str(layer.input_shape),
            str(layer.output_shape),
            f"{layer.parameters:,}",
        )
    console.print(table)

    verdict = "[green]PASS[/green]" if report.within_tolerance else "[red]FAIL[/red]"
    console.print(f"Extractor parameters: {report.extractor_parameters:,}")
    console.print(
        f"Total PSTAE parameters: {report.pstae_parameters:,} "
        f"(reference {report.reference_parameters:,}, "
        f"deviation {100 * report.relative_deviation:+.1f}%) {verdict}"
    )
