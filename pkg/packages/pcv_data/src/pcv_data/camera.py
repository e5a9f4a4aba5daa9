"""Depth image to point cloud conversion with pinhole intrinsics."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import cv2
import numpy as np
from pydantic import BaseModel, Field

from pcv_data.models import PointFrame
from pstae_core.errors import FormatError

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger(__name__)


class CameraIntrinsics(BaseModel):
    fx: float = Field(gt=0, description="Focal length along u in pixels")
    fy: float = Field(gt=0, description="Focal length along v in pixels")
    cx: float = Field(description="Principal point u in pixels")
    cy: float = Field(description="Principal point v in pixels")
    depth_scale: float = Field(
        default=0.001, gt=0, description="Meters per raw depth unit (0.001 for millimeter PNGs)"
    )


def depth_to_pointcloud(depth: np.ndarray, intr: CameraIntrinsics) -> PointFrame:
    """Back-project every pixel with depth > 0; points come out in row-major pixel order."""
    image = np.asarray(depth)
    v, u = np.nonzero(image > 0)
    z = image[v, u].astype(np.float64) * intr.depth_scale
    x = (u - intr.cx) * z / intr.fx
    y = (v - intr.cy) * z / intr.fy
    return PointFrame(points=np.stack([x, y, z], axis=1))


def project(points: np.ndarray, intr: CameraIntrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Pixel coordinates (u, v) of camera-space points; inverse of ``depth_to_pointcloud``."""
    pts = np.asarray(points, dtype=np.float64)
    z = pts[:, 2]
    return pts[:, 0] * intr.fx / z + intr.cx, pts[:, 1] * intr.fy / z + intr.cy


def load_depth_png(path: Path) -> np.ndarray:
    """Read a 16-bit single-channel depth PNG without any conversion."""
    image = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if image is None:
        raise FormatError(path, "not a readable image")
    if image.ndim != 2:
        raise FormatError(path, f"expected a single-channel depth image, got shape {image.shape}")
    return image


def load_intrinsics(path: Path) -> CameraIntrinsics:
    return CameraIntrinsics.model_validate_json(path.read_text())
