"""End-to-end stages over a dataset directory: pretrain, train, score and the BGsub baseline."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import TYPE_CHECKING

import numpy as np

from pcv_data.background import bgsub_baseline_score, classify_foreground
from pcv_data.formats import Split, read_labels, read_manifest, read_pcv
from pcv_data.synthetic.scene import ACTION_CLASSES
from pstae.evaluation import RocCurve, evaluate, roc_points
from pstae.preprocess import prepare_video, training_clips
from pstae.scoring import score_video, write_scores_csv
from pstae.training import PretrainResult, TrainReport, pretrain_extractor, train_pstae
from pstae_core.checkpoint import load_module, save_module
from pstae_core.errors import ConfigurationError
from pstnet.network import build_extractor, build_pstae

if TYPE_CHECKING:
    from pcv_data.formats import Manifest, ManifestEntry
    from pcv_data.models import PointFrame
    from pstae.config import RunConfig
    from pstae.evaluation import EvaluationReport
    from pstae.scoring import ScoreSeries
    from pstnet.network import PSTAE, Extractor

logger = logging.getLogger(__name__)


def _entries(manifest: Manifest, split: Split) -> list[ManifestEntry]:
    entries = manifest.by_split(split)
    if not entries:
        raise ConfigurationError(f"the dataset manifest lists no '{split}' videos")
    return entries


def load_video(
    config: RunConfig, manifest: Manifest, entry: ManifestEntry
) -> tuple[list[PointFrame], list[int]]:
    root = config.data.root
    frames = read_pcv(manifest.video_path(root, entry))
    labels_path = manifest.labels_path(root, entry)
    labels = read_labels(labels_path) if labels_path.exists() else [0] * len(frames)
    if len(labels) != len(frames):
        msg = f"{entry.video_id}: {len(labels)} labels for {len(frames)} frames"
        raise ConfigurationError(msg)
    return frames, labels


# =============================================================================
# Models
# =============================================================================


def load_extractor(config: RunConfig) -> Extractor:
    extractor = build_extractor(config.network.descriptor_dim, config.network, seed=config.seed)
    load_module(config.extractor_path, extractor)
    extractor.freeze()
    return extractor


def load_pstae(config: RunConfig) -> PSTAE:
    model = build_pstae(config.network.descriptor_dim, config.network, seed=config.seed)
    load_module(config.pstae_path, model)
    model.freeze()
    return model


def run_pretrain(config: RunConfig) -> PretrainResult:
    manifest = read_manifest(config.data.root)
    classes = [c.value for c in ACTION_CLASSES]
    clips: list[np.ndarray] = []
    labels: list[int] = []
    for entry in _entries(manifest, Split.ACTION):
        if entry.action not in classes:
            raise ConfigurationError(f"{entry.video_id}: unknown action '{entry.action}'")
        frames, _ = load_video(config, manifest, entry)
        video = prepare_video(
            frames,
            bgsub=config.bgsub,
            network=config.network,
            min_foreground_points=config.data.min_foreground_points,
            pad_tail=False,
            video_id=entry.video_id,
            seed=config.seed,
            subtract_background=False,
        )
        for clip in training_clips([video]):
            clips.append(clip)
            labels.append(classes.index(entry.action))

    extractor = build_extractor(config.network.descriptor_dim, config.network, seed=config.seed)
    result = pretrain_extractor(
        clips,
        labels,
        extractor,
        config.pretrain.sgd,
        seed=config.seed,
        hidden_channels=config.pretrain.hidden_channels,
        max_steps=config.max_steps,
    )
    save_module(config.extractor_path, result.extractor)
    result.report.checkpoint = str(config.extractor_path)
    return result


def run_train(config: RunConfig, extractor: Extractor | None = None) -> TrainReport:
    extractor = extractor or load_extractor(config)
    manifest = read_manifest(config.data.root)
    videos = []
    for entry in _entries(manifest, Split.TRAIN):
        frames, _ = load_video(config, manifest, entry)
        videos.append(
            prepare_video(
                frames,
                bgsub=config.bgsub,
                network=config.network,
                min_foreground_points=config.data.min_foreground_points,
                pad_tail=False,
                video_id=entry.video_id,
                seed=config.seed,
            )
        )
    model = build_pstae(config.network.descriptor_dim, config.network, seed=config.seed)
    report = train_pstae(
        training_clips(videos),
        extractor,
        model,
        config.sgd,
        seed=config.seed,
        max_steps=config.max_steps,
    )
    save_module(config.pstae_path, model)
    report.checkpoint = str(config.pstae_path)
    return report


# =============================================================================
# Scoring
# =============================================================================


def _score_one(args: tuple[RunConfig, ManifestEntry]) -> ScoreSeries:
    config, entry = args
    manifest = read_manifest(config.data.root)
    frames, labels = load_video(config, manifest, entry)
    series = score_video(
        frames, labels, load_extractor(config), load_pstae(config), config, video_id=entry.video_id
    )
    write_scores_csv(config.scores_dir / f"{entry.video_id}.csv", series)
    return series


def run_score(config: RunConfig, *, workers: int = 1) -> list[ScoreSeries]:
    """Score every test video into ``<runs>/scores_f<f>/<video>.csv``, in video-id order."""
    manifest = read_manifest(config.data.root)
    tasks = [(config, entry) for entry in _entries(manifest, Split.TEST)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            series = list(pool.map(_score_one, tasks))
    else:
        series = [_score_one(task) for task in tasks]
    logger.info("Scored %d test videos into %s", len(series), config.scores_dir)
    return series


def bgsub_scores(config: RunConfig, manifest: Manifest | None = None) -> dict[str, np.ndarray]:
    """Foreground-presence baseline of every test video, recomputed from the raw videos."""
    manifest = manifest or read_manifest(config.data.root)
    scores = {}
    for entry in _entries(manifest, Split.TEST):
        frames, _ = load_video(config, manifest, entry)
        foreground, _ = classify_foreground(frames, config.bgsub)
        scores[entry.video_id] = bgsub_baseline_score(foreground)
    return scores


def _check_test_ids(manifest: Manifest, series: list[ScoreSeries]) -> None:
    known = {entry.video_id for entry in manifest.by_split(Split.TEST)}
    unknown = sorted(s.video_id for s in series if s.video_id not in known)
    if unknown:
        raise ConfigurationError(f"scores for videos outside the test split: {unknown}")


def run_evaluate(config: RunConfig, series: list[ScoreSeries]) -> EvaluationReport:
    manifest = read_manifest(config.data.root)
    _check_test_ids(manifest, series)
    report = evaluate(series, manifest.categories(), bgsub_scores(config, manifest))
    if report.auroc is not None:
        logger.info("Frame-level AUROC %.4f over %d frames", report.auroc, report.num_frames)
    return report


def pooled_roc(series: list[ScoreSeries]) -> RocCurve:
    ordered = sorted(series, key=lambda s: s.video_id)
    scores = np.concatenate([s.score for s in ordered])
    labels = np.concatenate([s.label for s in ordered])
    return roc_points(scores, labels)


def bgsub_roc(config: RunConfig, series: list[ScoreSeries]) -> RocCurve:
    manifest = read_manifest(config.data.root)
    _check_test_ids(manifest, series)
    baseline = bgsub_scores(config, manifest)
    ordered = sorted(series, key=lambda s: s.video_id)
    scores = np.concatenate([baseline[s.video_id].astype(np.float64) for s in ordered])
    labels = np.concatenate([s.label for s in ordered])
    return roc_points(scores, labels)
