"""On-disk formats: PCV1 point videos, label sidecars, dataset manifests, PLY heat maps.

PCV1 layout (little-endian)::

    b"PCV1"  u32 frame_count
    per frame: u32 point_count  f32 xyz[point_count][3]
"""

from __future__ import annotations

import logging
import struct
from enum import StrEnum
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field

from pcv_data.models import PointFrame
from pstae_core.errors import FormatError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence
    from pathlib import Path

logger = logging.getLogger(__name__)

PCV1_MAGIC = b"PCV1"
PCV1_VERSION = 1
VIDEO_SUFFIX = ".pcv"
LABELS_SUFFIX = ".labels"


def write_pcv(path: Path, frames: Sequence[PointFrame]) -> None:
    chunks = [PCV1_MAGIC, struct.pack("<I", len(frames))]
    for frame in frames:
        chunks.append(struct.pack("<I", frame.num_points))
        chunks.append(frame.points.astype("<f4").tobytes())
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    logger.debug("Wrote %s (%d frames)", path, len(frames))


def read_pcv(path: Path) -> list[PointFrame]:
    blob = path.read_bytes()
    if blob[:4] != PCV1_MAGIC:
        raise FormatError(path, "missing PCV1 magic")
    try:
        (count,) = struct.unpack_from("<I", blob, 4)
        offset = 8
        frames = []
        for _ in range(count):
            (n,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            values = np.frombuffer(blob, dtype="<f4", count=3 * n, offset=offset)
            offset += 12 * n
            frames.append(PointFrame(points=values.astype(np.float64).reshape(n, 3)))
    except (struct.error, ValueError) as exc:
        raise FormatError(path, f"truncated or corrupt video: {exc}") from None
    if offset != len(blob):
        raise FormatError(path, f"{len(blob) - offset} trailing bytes after {count} frames")
    return frames


def write_labels(path: Path, labels: Iterable[int]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{int(v)}\n" for v in labels), encoding="utf-8")


def read_labels(path: Path) -> list[int]:
    labels = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        value = line.strip()
        if not value:
            continue
        if value not in ("0", "1"):
            raise FormatError(path, f"line {lineno}: label must be 0 or 1, got {value!r}")
        labels.append(int(value))
    return labels


# =============================================================================
# Manifest
# =============================================================================


class Split(StrEnum):
    TRAIN = "train"
    TEST = "test"
    ACTION = "action"


NORMAL_CATEGORY = "normal"


class ManifestEntry(BaseModel):
    video_id: str
    split: Split
    category: str = Field(
        default=NORMAL_CATEGORY, description="Anomaly category, or 'normal' for normal videos"
    )
    action: str | None = Field(default=None, description="Action class for pretraining clips")
    num_frames: int = 0


class Manifest(BaseModel):
    videos: list[ManifestEntry] = Field(default_factory=list)

    def by_split(self, split: Split) -> list[ManifestEntry]:
        return sorted((v for v in self.videos if v.split is split), key=lambda v: v.video_id)

    def categories(self) -> dict[str, str]:
        return {v.video_id: v.category for v in self.videos}

    def video_path(self, root: Path, entry: ManifestEntry) -> Path:
        return root / entry.split.value / f"{entry.video_id}{VIDEO_SUFFIX}"

    def labels_path(self, root: Path, entry: ManifestEntry) -> Path:
        return root / entry.split.value / f"{entry.video_id}{LABELS_SUFFIX}"


MANIFEST_NAME = "manifest.json"


def write_manifest(root: Path, manifest: Manifest) -> Path:
    path = root / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def read_manifest(root: Path) -> Manifest:
    path = root / MANIFEST_NAME if root.is_dir() else root
    if not path.exists():
        raise FormatError(path, "manifest not found")
    return Manifest.model_validate_json(path.read_text(encoding="utf-8"))


# =============================================================================
# PLY
# =============================================================================


def write_ply(path: Path, points: np.ndarray, errors: np.ndarray) -> None:
    """ASCII PLY with ``x y z`` and a scalar ``error`` property per vertex."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    err = np.asarray(errors, dtype=np.float64).reshape(-1)
    if err.shape[0] != pts.shape[0]:
        raise FormatError(path, f"{err.shape[0]} error values for {pts.shape[0]} points")
    header = [
        "ply",
        "format ascii 1.0",
        f"element vertex {pts.shape[0]}",
        "property float x",
        "property float y",
        "property float z",
        "property float error",
        "end_header",
    ]
    body = [f"{x:.6f} {y:.6f} {z:.6f} {e:.9g}" for (x, y, z), e in zip(pts, err, strict=True)]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(header + body) + "\n", encoding="ascii")


def read_ply(path: Path) -> tuple[np.ndarray, np.ndarray]:
    lines = path.read_text(encoding="ascii").splitlines()
    try:
        end = lines.index("end_header")
    except ValueError:
        raise FormatError(path, "missing end_header") from None
    rows = [line.split() for line in lines[end + 1 :] if line.strip()]
    data = np.asarray(rows, dtype=np.float64).reshape(-1, 4)
    return data[:, :3], data[:, 3]
