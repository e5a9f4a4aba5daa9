"""Per-anchor reconstruction-error heat maps."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from pcv_data.formats import write_ply
from pstae.loss import anchor_errors
from pstae.training import descriptors
from pstae_core.tensor import no_grad

if TYPE_CHECKING:
    from pathlib import Path

    from pstnet.network import PSTAE, Extractor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HeatMap:
    coords: np.ndarray
    errors: np.ndarray

    def frame_totals(self) -> np.ndarray:
        return self.errors.sum(axis=1)


def heatmap(points: np.ndarray, extractor: Extractor, model: PSTAE) -> HeatMap:
    """Error ``||F_i[j] - F_hat_i[j]||^2`` at every anchor ``j`` of every frame ``i``."""
    target = descriptors(extractor, points)
    with no_grad():
        recon = model(target)
    assert target.features is not None and recon.features is not None
    return HeatMap(coords=target.coords, errors=anchor_errors(target.features, recon.features))


def export_heatmap(
    directory: Path,
    video_id: str,
    heat: HeatMap,
    *,
    start_frame: int = 0,
    num_real_frames: int | None = None,
) -> list[Path]:
    """One ASCII PLY per real frame, named ``<video>_<frame>.ply``."""
    count = heat.coords.shape[0] if num_real_frames is None else num_real_frames
    paths = []
    for i in range(count):
        path = directory / f"{video_id}_{start_frame + i:05d}.ply"
        write_ply(path, heat.coords[i], heat.errors[i])
        paths.append(path)
    logger.info("Wrote %d heat map frames to %s", len(paths), directory)
    return paths
