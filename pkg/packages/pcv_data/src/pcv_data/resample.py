"""Per-frame point-count normalisation and clip segmentation."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from pcv_data.models import Clip, PointFrame
from pstae_core.errors import ConfigurationError
from pstnet.sampling import FpsSeed, fps, resolve_seed

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)


def resample_frame(
    frame: PointFrame,
    target: int,
    *,
    rng: np.random.Generator | None = None,
    fps_seed: FpsSeed = FpsSeed.FIRST,
) -> PointFrame:
    """Return a frame with exactly ``target`` points.

    Larger frames are reduced with farthest point sampling; smaller non-empty frames keep all
    their points and append seeded duplicates of them; an empty frame stays empty.
    """
    if target < 1:
        raise ConfigurationError(f"resample target must be >= 1, got {target}")
    n = frame.num_points
    if n == target:
        return frame
    if n == 0:
        return PointFrame.empty()
    if n > target:
        return frame.select(fps(frame.points, target, resolve_seed(frame.points, fps_seed)))
    generator = rng if rng is not None else np.random.default_rng(0)
    extra = generator.integers(0, n, size=target - n)
    return frame.select(np.concatenate([np.arange(n), extra]))


def segment_video(
    video: Sequence[PointFrame], length: int, *, pad_tail: bool, video_id: str = ""
) -> list[Clip]:
    """Split a video into consecutive non-overlapping clips of ``length`` frames.

    With ``pad_tail`` a short remainder is completed by repeating its last frame and the copies
    are flagged as padded; otherwise the remainder is dropped.
    """
    if length < 1:
        raise ConfigurationError(f"clip length must be >= 1, got {length}")
    frames = list(video)
    clips = []
    for start in range(0, len(frames), length):
        chunk = frames[start : start + length]
        padded = [False] * len(chunk)
        if len(chunk) < length:
            if not pad_tail:
                logger.debug("%s: dropping %d tail frames", video_id or "video", len(chunk))
                break
            missing = length - len(chunk)
            chunk = chunk + [chunk[-1]] * missing
            padded += [True] * missing
        clips.append(
            Clip(
                frames=tuple(chunk),
                source_video_id=video_id,
                start_frame_index=start,
                padded=tuple(padded),
            )
        )
    return clips
