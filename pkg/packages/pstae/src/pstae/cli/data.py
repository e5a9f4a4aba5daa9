"""Dataset commands: synthetic generation and depth-image ingestion."""

from collections import Counter
from pathlib import Path  # noqa: TC003 — typer needs runtime Path
from typing import Annotated

import typer
from rich.panel import Panel
from rich.table import Table

from pcv_data.camera import depth_to_pointcloud, load_depth_png, load_intrinsics
from pcv_data.formats import read_labels, write_labels, write_pcv
from pcv_data.synthetic.dataset import generate_dataset
from pstae.cli.common import command_errors, console, run_config
from pstae_core.errors import ConfigurationError


def gen_data(
    ctx: typer.Context,
    workers: Annotated[int, typer.Option("--workers", "-w", min=1, help="Parallel videos")] = 1,
    root: Annotated[
        Path | None, typer.Option("--root", help="Output directory (default: data.root)")
    ] = None,
) -> None:
    """Generate the synthetic train/test/action dataset with labels and manifest."""
    config = run_config(ctx)
    target = root or config.data.root
    console.print(Panel.fit("Generating synthetic point-cloud videos", style="bold blue"))
    with command_errors("gen-data"), console.status("[bold green]Rendering videos..."):
        manifest = generate_dataset(target, config.data.synthetic, workers=workers)

    counts = Counter(
        (v.split.value, v.category if v.action is None else v.action) for v in manifest.videos
    )
    table = Table()
    table.add_column("Split", style="cyan")
    table.add_column("Category / action")
    table.add_column("Videos", justify="right")
    for (split, category), n in sorted(counts.items()):
        table.add_row(split, category, str(n))
    console.print(table)
    console.print(f"[green]✓[/green] Dataset written to [cyan]{target}[/cyan]")


def ingest(
    depth_dir: Annotated[Path, typer.Argument(help="Directory of 16-bit depth PNG frames")],
    intrinsics: Annotated[
        Path, typer.Option("--intrinsics", "-i", help="JSON with fx, fy, cx, cy, depth_scale")
    ],
    output: Annotated[Path, typer.Option("--output", "-o", help="Destination .pcv file")],
    labels: Annotated[
        Path | None, typer.Option("--labels", "-l", help="Per-frame 0/1 label file to copy")
    ] = None,
    pattern: Annotated[str, typer.Option("--pattern", help="Frame file glob")] = "*.png",
) -> None:
    """Convert a depth-image sequence into a PCV1 point-cloud video."""
    with command_errors("ingest"):
        intr = load_intrinsics(intrinsics)
        paths = sorted(depth_dir.glob(pattern))
        if not paths:
            raise ConfigurationError(f"no frames matching '{pattern}' in {depth_dir}")
        with console.status(f"[bold green]Converting {len(paths)} frames..."):
            frames = [depth_to_pointcloud(load_depth_png(p), intr) for p in paths]
        write_pcv(output, frames)
        if labels is not None:
            values = read_labels(labels)
            if len(values) != len(frames):
                raise ConfigurationError(f"{labels}: {len(values)} labels for {len(frames)} frames")
            write_labels(output.with_suffix(".labels"), values)

    points = sum(f.num_points for f in frames)
    console.print(
        f"[green]✓[/green] {len(frames)} frames, {points} points -> [cyan]{output}[/cyan]"
    )
