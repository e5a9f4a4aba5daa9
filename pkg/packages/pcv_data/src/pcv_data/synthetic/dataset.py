"""Write a complete synthetic dataset: train/test videos, label sidecars, action clips, manifest."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import cycle, islice
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field

from pcv_data.formats import (
    NORMAL_CATEGORY,
    Manifest,
    ManifestEntry,
    Split,
    write_labels,
    write_manifest,
    write_pcv,
)
from pcv_data.synthetic.generator import anomaly_scripts, gen_action_dataset, gen_video
from pcv_data.synthetic.scene import (
    ACTION_CLASSES,
    CATEGORY_OF,
    BehaviorKind,
    BehaviorScript,
    SceneConfig,
)

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger(__name__)

TEST_ANOMALIES: tuple[BehaviorKind, ...] = (
    BehaviorKind.RUN,
    BehaviorKind.COLLAPSE,
    BehaviorKind.CRAWL,
    BehaviorKind.LEAVE_OBJECT,
    BehaviorKind.ARGUE,
)


class DatasetSpec(BaseModel):
    scene: SceneConfig = Field(default_factory=SceneConfig)
    train_videos: int = Field(default=50, ge=0, description="Normal training videos")
    test_normal_videos: int = Field(default=8, ge=0, description="Normal test videos")
    test_anomalous_videos: int = Field(
        default=12, ge=0, description="Anomalous test videos, cycling through the anomaly kinds"
    )
    action_clips_per_class: int = Field(default=10, ge=0, description="Pretraining clips per class")
    seed: int = Field(default=0, description="Root seed; every video derives its own from it")


@dataclass(frozen=True)
class VideoJob:
    video_id: str
    split: Split
    scene: SceneConfig
    scripts: tuple[BehaviorScript, ...] = ()
    category: str = NORMAL_CATEGORY


def video_seed(root_seed: int, split: Split, index: int) -> int:
    stream = list(Split).index(split)
    return int(np.random.SeedSequence([root_seed, stream, index]).generate_state(1)[0])


def plan_jobs(spec: DatasetSpec) -> list[VideoJob]:
    jobs = []
    for i in range(spec.train_videos):
        scene = spec.scene.model_copy(update={"seed": video_seed(spec.seed, Split.TRAIN, i)})
        jobs.append(VideoJob(video_id=f"train-{i:04d}", split=Split.TRAIN, scene=scene))

    kinds = [None] * spec.test_normal_videos + list(
        islice(cycle(TEST_ANOMALIES), spec.test_anomalous_videos)
    )
    for i, kind in enumerate(kinds):
        seed = video_seed(spec.seed, Split.TEST, i)
        scene = spec.scene.model_copy(update={"seed": seed})
        if kind is None:
            jobs.append(VideoJob(video_id=f"test-{i:04d}", split=Split.TEST, scene=scene))
            continue
        scripts = anomaly_scripts(scene, kind, np.random.default_rng([seed, 1]))
        jobs.append(
            VideoJob(
                video_id=f"test-{i:04d}",
                split=Split.TEST,
                scene=scene,
                scripts=tuple(scripts),
                category=CATEGORY_OF[kind].value,
            )
        )
    return jobs


def render_job(root: Path, job: VideoJob) -> ManifestEntry:
    frames, labels = gen_video(job.scene, list(job.scripts))
    write_pcv(root / job.split.value / f"{job.video_id}.pcv", frames)
    write_labels(root / job.split.value / f"{job.video_id}.labels", labels)
    return ManifestEntry(
        video_id=job.video_id, split=job.split, category=job.category, num_frames=len(frames)
    )


def _render(args: tuple[Path, VideoJob]) -> ManifestEntry:
    return render_job(*args)


def generate_dataset(root: Path, spec: DatasetSpec, *, workers: int = 1) -> Manifest:
    """Render every video of ``spec`` under ``root`` and write the manifest.

    Videos are independent; with ``workers > 1`` they render in a process pool. The manifest
    lists entries in video-id order regardless of worker count.
    """
    jobs = plan_jobs(spec)
    tasks = [(root, job) for job in jobs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_render, tasks))
    else:
        entries = [_render(task) for task in tasks]

    if spec.action_clips_per_class:
        scene = spec.scene.model_copy(update={"seed": spec.seed})
        for clip in gen_action_dataset(scene, ACTION_CLASSES, spec.action_clips_per_class):
            video_id = f"action-{clip.clip.source_video_id}"
            write_pcv(root / Split.ACTION.value / f"{video_id}.pcv", clip.clip.frames)
            entries.append(
                ManifestEntry(
                    video_id=video_id,
                    split=Split.ACTION,
                    action=clip.action.value,
                    num_frames=clip.clip.length,
                )
            )

    manifest = Manifest(videos=sorted(entries, key=lambda e: (e.split.value, e.video_id)))
    path = write_manifest(root, manifest)
    logger.info("Wrote %d videos and manifest %s", len(manifest.videos), path)
    return manifest
