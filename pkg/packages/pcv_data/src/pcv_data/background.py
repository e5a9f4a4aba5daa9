"""Voxel-density background subtraction and the foreground-presence baseline score.

Points are binned into cubic voxels of edge ``r`` (voxel of ``p`` is ``floor(p / r)``). Within a
window of frames, a voxel's cumulative density ``D`` is the number of points of all window
frames that fall into it; points in voxels with ``D > theta`` are background.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field

from pcv_data.models import PointFrame

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = logging.getLogger(__name__)


class BackgroundWindow(StrEnum):
    BLOCK = "block"
    WHOLE_VIDEO = "whole-video"


class BgsubConfig(BaseModel):
    voxel_size: float = Field(default=0.05, gt=0, description="Voxel edge length r in meters")
    window_length: int = Field(default=30, ge=1, description="Frames l accumulated per window")
    density_threshold: float = Field(
        default=100, ge=0, description="Voxels with density D above theta are background"
    )
    window: BackgroundWindow = Field(
        default=BackgroundWindow.BLOCK,
        description="Non-overlapping l-frame blocks, or one grid over the whole video",
    )


Voxel = tuple[int, int, int]


@dataclass
class DensityGrid:
    voxel_size: float
    counts: dict[Voxel, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.counts)

    def density(self, voxel: Voxel) -> int:
        return self.counts.get(voxel, 0)


def voxel_keys(points: np.ndarray, voxel_size: float) -> np.ndarray:
    return np.floor(np.asarray(points, dtype=np.float64) / voxel_size).astype(np.int64)


def build_density_grid(frames: Sequence[PointFrame], voxel_size: float) -> DensityGrid:
    grid = DensityGrid(voxel_size=voxel_size)
    stacked = [f.points for f in frames if not f.is_empty]
    if not stacked:
        return grid
    keys, counts = np.unique(
        voxel_keys(np.concatenate(stacked), voxel_size), axis=0, return_counts=True
    )
    grid.counts = {
        (int(k[0]), int(k[1]), int(k[2])): int(c) for k, c in zip(keys, counts, strict=True)
    }
    return grid


def _point_densities(frames: Sequence[PointFrame], voxel_size: float) -> list[np.ndarray]:
    """Per frame, the window density of each point's voxel (same order as the points)."""
    sizes = [f.num_points for f in frames]
    if sum(sizes) == 0:
        return [np.zeros(0, dtype=np.int64) for _ in frames]
    keys = voxel_keys(np.concatenate([f.points for f in frames]), voxel_size)
    _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
    per_point = counts[inverse.reshape(-1)]
    return np.split(per_point, np.cumsum(sizes)[:-1])


def _windows(length: int, cfg: BgsubConfig) -> list[range]:
    if cfg.window is BackgroundWindow.WHOLE_VIDEO:
        return [range(length)] if length else []
    step = cfg.window_length
    return [range(s, min(s + step, length)) for s in range(0, length, step)]


def classify_foreground(
    video: Sequence[PointFrame], cfg: BgsubConfig
) -> tuple[list[PointFrame], list[PointFrame]]:
    """Split every frame into (foreground, background), preserving point order in each."""
    foreground: list[PointFrame] = []
    background: list[PointFrame] = []
    for window in _windows(len(video), cfg):
        frames = [video[i] for i in window]
        for frame, density in zip(
            frames, _point_densities(frames, cfg.voxel_size), strict=True
        ):
            is_background = density > cfg.density_threshold
            foreground.append(frame.select(~is_background))
            background.append(frame.select(is_background))
    fg_points = sum(f.num_points for f in foreground)
    bg_points = sum(f.num_points for f in background)
    logger.debug("Foreground %d points, background %d points", fg_points, bg_points)
    return foreground, background


def bgsub_baseline_score(foreground: Sequence[PointFrame]) -> np.ndarray:
    """1 for every frame with at least one foreground point, else 0."""
    return np.asarray([0 if f.is_empty else 1 for f in foreground], dtype=np.int64)
