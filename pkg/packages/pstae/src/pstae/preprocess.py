"""Turn raw point-cloud videos into network-ready clips.

Foreground extraction, then per-frame resampling to ``M`` points, then segmentation into clips
of ``L`` frames. A frame whose foreground has fewer than ``min_foreground_points`` points is
empty: it never gets a network score, and for network input it is replaced by the nearest
non-empty frame of the same video (the earlier one on ties) so every clip stays rectangular.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from pcv_data.background import BgsubConfig, classify_foreground
from pcv_data.resample import resample_frame, segment_video

if TYPE_CHECKING:
    from collections.abc import Sequence

    from pcv_data.models import Clip, PointFrame
    from pstnet.config import ModelConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedVideo:
    video_id: str
    foreground: list[PointFrame]
    empty: np.ndarray
    clips: list[Clip]

    @property
    def num_frames(self) -> int:
        return len(self.foreground)

    def clip_is_empty(self, clip: Clip) -> bool:
        """True when every real frame of ``clip`` is empty (or the video has no content)."""
        real = [t for t, pad in zip(clip.frame_indices, clip.padded, strict=True) if not pad]
        return bool(np.all(self.empty[real]))


def nearest_nonempty(empty: np.ndarray) -> np.ndarray | None:
    """Index of the nearest non-empty frame for every frame, or ``None`` if all are empty."""
    filled = np.flatnonzero(~empty)
    if filled.size == 0:
        return None
    frames = np.arange(empty.shape[0])
    return filled[np.argmin(np.abs(frames[:, None] - filled[None, :]), axis=1)]


def resample_video(
    frames: Sequence[PointFrame],
    network: ModelConfig,
    *,
    empty: np.ndarray | None = None,
    seed: int = 0,
) -> list[PointFrame] | None:
    """Every frame at exactly ``network.num_points`` points, empty frames filled in."""
    mask = (
        np.asarray([f.is_empty for f in frames], dtype=bool)
        if empty is None
        else np.asarray(empty, dtype=bool)
    )
    source = nearest_nonempty(mask)
    if source is None:
        return None
    cache: dict[int, PointFrame] = {}
    out = []
    for src in source:
        key = int(src)
        if key not in cache:
            cache[key] = resample_frame(
                frames[key],
                network.num_points,
                rng=np.random.default_rng([seed, key]),
                fps_seed=network.fps_seed,
            )
        out.append(cache[key])
    return out


def prepare_video(
    frames: Sequence[PointFrame],
    *,
    bgsub: BgsubConfig,
    network: ModelConfig,
    min_foreground_points: int,
    pad_tail: bool,
    video_id: str = "",
    seed: int = 0,
    subtract_background: bool = True,
) -> PreparedVideo:
    if subtract_background:
        foreground, _ = classify_foreground(frames, bgsub)
    else:
        foreground = list(frames)
    empty = np.asarray([f.num_points < min_foreground_points for f in foreground], dtype=bool)
    if empty.any():
        logger.warning(
            "%s: %d of %d frames have under %d foreground points",
            video_id or "video",
            int(empty.sum()),
            empty.shape[0],
            min_foreground_points,
        )
    resampled = resample_video(foreground, network, empty=empty, seed=seed)
    clips = (
        []
        if resampled is None
        else segment_video(resampled, network.clip_length, pad_tail=pad_tail, video_id=video_id)
    )
    return PreparedVideo(video_id=video_id, foreground=foreground, empty=empty, clips=clips)


def training_clips(videos: Sequence[PreparedVideo]) -> list[np.ndarray]:
    """(L, M, 3) arrays of every clip that has at least one non-empty frame."""
    arrays = []
    for video in videos:
        for clip in video.clips:
            if video.clip_is_empty(clip):
                continue
            arrays.append(clip.as_array())
    return arrays
