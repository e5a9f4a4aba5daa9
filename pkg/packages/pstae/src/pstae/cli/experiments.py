"""Experiment commands: scoring, evaluation, heat maps and the descriptor-width sweep."""

from pathlib import Path  # noqa: TC003 — typer needs runtime Path
from typing import Annotated

import typer
from rich.panel import Panel
from rich.table import Table

from pcv_data.formats import read_manifest
from pstae.cli.common import command_errors, console, run_config, write_json
from pstae.evaluation import EvaluationReport
from pstae.heatmap import export_heatmap, heatmap
from pstae.pipeline import (
    bgsub_roc,
    load_extractor,
    load_pstae,
    load_video,
    pooled_roc,
    run_evaluate,
    run_pretrain,
    run_score,
    run_train,
)
from pstae.preprocess import prepare_video
from pstae.scoring import read_scores_csv
from pstae_core.errors import ConfigurationError
from pstnet.config import DESCRIPTOR_DIMS


def score(
    ctx: typer.Context,
    workers: Annotated[int, typer.Option("--workers", "-w", min=1, help="Parallel videos")] = 1,
) -> None:
    """Score every test video into one CSV per video."""
    config = run_config(ctx)
    console.print(Panel.fit("Scoring test videos", style="bold blue"))
    with command_errors("score"), console.status("[bold green]Scoring..."):
        series = run_score(config, workers=workers)
    frames = sum(len(s) for s in series)
    console.print(
        f"[green]✓[/green] {len(series)} videos, {frames} frames "
        f"-> [cyan]{config.scores_dir}[/cyan]"
    )


def _print_evaluation(report: EvaluationReport) -> None:
    def fmt(value: float | None) -> str:
        return "[red]undefined[/red]" if value is None else f"{value:.4f}"

    table = Table(title=f"{report.num_videos} videos, {report.num_frames} frames")
    table.add_column("Category", style="cyan")
    table.add_column("PSTAE AUROC", justify="right")
    table.add_column("BGsub AUROC", justify="right")
    for name, value in report.per_category.items():
        table.add_row(name, fmt(value), fmt(report.bgsub_per_category.get(name)))
    table.add_row("[bold]total[/bold]", fmt(report.auroc), fmt(report.bgsub_auroc))
    console.print(table)
    for error in report.errors:
        console.print(f"  [yellow]![/yellow] {error}")


def evaluate(
    ctx: typer.Context,
    scores_dir: Annotated[
        Path | None, typer.Option("--scores", help="Directory of score CSVs")
    ] = None,
    output: Annotated[Path | None, typer.Option("--output", "-o", help="Report JSON path")] = None,
) -> None:
    """Frame-level AUROC overall and per category, next to the BGsub baseline."""
    config = run_config(ctx)
    source = scores_dir or config.scores_dir
    target = output or config.data.runs / f"eval_f{config.network.descriptor_dim}.json"
    with command_errors("eval"):
        paths = sorted(source.glob("*.csv"))
        if not paths:
            raise ConfigurationError(f"no score CSVs in {source}; run 'pstae score' first")
        report = run_evaluate(config, [read_scores_csv(p) for p in paths])
        write_json(target, report)
    _print_evaluation(report)


def heatmap_command(
    ctx: typer.Context,
    video_id: Annotated[str, typer.Argument(help="Video id from the manifest")],
    clip_index: Annotated[int, typer.Option("--clip", min=0, help="Clip index in the video")] = 0,
    output: Annotated[
        Path | None, typer.Option("--output", "-o", help="Directory for PLY files")
    ] = None,
) -> None:
    """Export per-anchor reconstruction errors of one clip as PLY point clouds."""
    config = run_config(ctx)
    target = output or config.data.runs / "heatmaps"
    with command_errors("heatmap"):
        manifest = read_manifest(config.data.root)
        entry = next((v for v in manifest.videos if v.video_id == video_id), None)
        if entry is None:
            raise ConfigurationError(f"video '{video_id}' is not in the manifest")
        frames, _ = load_video(config, manifest, entry)
        video = prepare_video(
            frames,
            bgsub=config.bgsub,
            network=config.network,
            min_foreground_points=config.data.min_foreground_points,
            pad_tail=True,
            video_id=video_id,
            seed=config.seed,
        )
        if clip_index >= len(video.clips):
            raise ConfigurationError(f"{video_id} has {len(video.clips)} scorable clips")
        clip = video.clips[clip_index]
        heat = heatmap(clip.as_array(), load_extractor(config), load_pstae(config))
        paths = export_heatmap(
            target,
            video_id,
            heat,
            start_frame=clip.start_frame_index,
            num_real_frames=clip.num_real_frames,
        )
    console.print(f"[green]✓[/green] {len(paths)} PLY frames -> [cyan]{target}[/cyan]")


def sweep_f(
    ctx: typer.Context,
    workers: Annotated[int, typer.Option("--workers", "-w", min=1, help="Parallel videos")] = 1,
) -> None:
    """Pretrain, train and score once per descriptor width f; write one ROC file per f."""
    config = run_config(ctx)
    runs = config.data.runs
    table = Table(title="Descriptor width sweep")
    table.add_column("f", justify="right", style="cyan")
    table.add_column("AUROC", justify="right")
    table.add_column("ROC file")

    with command_errors("sweep-f"):
        series = []
        for f in DESCRIPTOR_DIMS:
            network = config.network.model_copy(update={"descriptor_dim": f})
            run = config.model_copy(update={"network": network})
            with console.status(f"[bold green]f={f}: pretraining, training, scoring..."):
                result = run_pretrain(run)
                run_train(run, result.extractor)
                series = run_score(run, workers=workers)
                roc = pooled_roc(series)
            path = runs / f"roc_f{f}.json"
            write_json(path, roc)
            table.add_row(str(f), f"{roc.auroc:.4f}", str(path))
        baseline = bgsub_roc(config, series)
        write_json(runs / "roc_bgsub.json", baseline)
        table.add_row("BGsub", f"{baseline.auroc:.4f}", str(runs / "roc_bgsub.json"))
    console.print(table)
