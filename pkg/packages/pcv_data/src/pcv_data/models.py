"""Point-cloud video data types."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from pstae_core.errors import ConfigurationError


@dataclass(frozen=True)
class PointFrame:
    """One time step: N points in meters, optionally with an (N, f) feature matrix."""

    points: np.ndarray
    features: np.ndarray | None = None

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        object.__setattr__(self, "points", pts)
        if not np.all(np.isfinite(pts)):
            raise ConfigurationError("PointFrame coordinates must be finite")
        if self.features is not None:
            feats = np.asarray(self.features, dtype=np.float64)
            if feats.ndim != 2 or feats.shape[0] != pts.shape[0]:
                msg = f"features {feats.shape} do not match {pts.shape[0]} points"
                raise ConfigurationError(msg)
            object.__setattr__(self, "features", feats)

    @classmethod
    def empty(cls) -> PointFrame:
        return cls(points=np.zeros((0, 3)))

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.points.shape[0] == 0

    def select(self, mask_or_index: np.ndarray) -> PointFrame:
        feats = None if self.features is None else self.features[mask_or_index]
        return PointFrame(points=self.points[mask_or_index], features=feats)


@dataclass(frozen=True)
class Clip:
    """``L`` consecutive frames of one video; ``padded[i]`` marks tail-padding frames."""

    frames: tuple[PointFrame, ...]
    source_video_id: str
    start_frame_index: int
    padded: tuple[bool, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.padded:
            object.__setattr__(self, "padded", (False,) * len(self.frames))
        if len(self.padded) != len(self.frames):
            raise ConfigurationError("padded flags must match the frame count")

    @property
    def length(self) -> int:
        return len(self.frames)

    @property
    def num_real_frames(self) -> int:
        return sum(not p for p in self.padded)

    @property
    def frame_indices(self) -> range:
        return range(self.start_frame_index, self.start_frame_index + self.length)

    def as_array(self) -> np.ndarray:
        """(L, M, 3) coordinates; every frame must hold the same number of points."""
        counts = {f.num_points for f in self.frames}
        if len(counts) != 1:
            raise ConfigurationError(f"clip frames have differing point counts {sorted(counts)}")
        return np.stack([f.points for f in self.frames])
