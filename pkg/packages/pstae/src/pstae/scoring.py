"""Per-frame anomaly scores: raw reconstruction loss, trailing smoothing, per-video min-max."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from pstae.config import ScoringConfig, SmoothOrder
from pstae.loss import per_frame_loss
from pstae.preprocess import prepare_video
from pstae.training import descriptors
from pstae_core.errors import ConfigurationError, FormatError
from pstae_core.tensor import no_grad

if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path

    from pcv_data.models import PointFrame
    from pstae.config import RunConfig
    from pstnet.network import PSTAE, Extractor

logger = logging.getLogger(__name__)

CSV_HEADER = ("frame", "raw_loss", "smoothed", "score", "label")


@dataclass(frozen=True)
class ScoreSeries:
    """Per-frame scores of one video; padded frames never appear here."""

    video_id: str
    raw_loss: np.ndarray
    smoothed: np.ndarray
    score: np.ndarray
    label: np.ndarray

    def __post_init__(self) -> None:
        lengths = {a.shape[0] for a in (self.raw_loss, self.smoothed, self.score, self.label)}
        if len(lengths) > 1:
            raise ConfigurationError(f"{self.video_id}: score columns differ in length {lengths}")
        if self.score.size and (self.score.min() < 0 or self.score.max() > 1):
            raise ConfigurationError(f"{self.video_id}: normalized scores must lie in [0, 1]")

    def __len__(self) -> int:
        return self.raw_loss.shape[0]


def smooth(values: np.ndarray, window: int) -> np.ndarray:
    """Causal moving average: mean of the up-to-``window`` values ending at each frame."""
    x = np.asarray(values, dtype=np.float64)
    if window < 1:
        raise ConfigurationError(f"smoothing window must be >= 1, got {window}")
    if x.size == 0:
        return x.copy()
    csum = np.concatenate([[0.0], np.cumsum(x)])
    ends = np.arange(1, x.size + 1)
    starts = np.maximum(0, ends - window)
    return (csum[ends] - csum[starts]) / (ends - starts)


def normalize(values: np.ndarray) -> np.ndarray:
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        return x.copy()
    lo, hi = x.min(), x.max()
    if hi <= lo:
        return np.zeros_like(x)
    return np.clip((x - lo) / (hi - lo), 0.0, 1.0)


def score_series(
    video_id: str,
    raw_loss: np.ndarray,
    labels: Sequence[int] | np.ndarray,
    scoring: ScoringConfig | None = None,
) -> ScoreSeries:
    cfg = scoring or ScoringConfig()
    raw = np.asarray(raw_loss, dtype=np.float64)
    if cfg.smooth_order is SmoothOrder.PRE_NORM:
        smoothed = smooth(raw, cfg.window)
        score = normalize(smoothed)
    else:
        smoothed = smooth(normalize(raw), cfg.window)
        score = np.clip(smoothed, 0.0, 1.0)
    return ScoreSeries(
        video_id=video_id,
        raw_loss=raw,
        smoothed=smoothed,
        score=score,
        label=np.asarray(labels, dtype=np.int64),
    )


def raw_losses(
    frames: Sequence[PointFrame],
    extractor: Extractor,
    model: PSTAE,
    config: RunConfig,
    *,
    video_id: str = "",
) -> np.ndarray:
    """Per-frame reconstruction loss; empty-foreground frames stay 0 and are never evaluated."""
    video = prepare_video(
        frames,
        bgsub=config.bgsub,
        network=config.network,
        min_foreground_points=config.data.min_foreground_points,
        pad_tail=True,
        video_id=video_id,
        seed=config.seed,
    )
    raw = np.zeros(video.num_frames)
    for clip in video.clips:
        if video.clip_is_empty(clip):
            continue
        target = descriptors(extractor, clip.as_array())
        with no_grad():
            recon = model(target)
        assert target.features is not None and recon.features is not None
        losses = per_frame_loss(target.features, recon.features)
        for t, padded, loss in zip(clip.frame_indices, clip.padded, losses, strict=True):
            if not padded and not video.empty[t]:
                raw[t] = loss
    return raw


def score_video(
    frames: Sequence[PointFrame],
    labels: Sequence[int],
    extractor: Extractor,
    model: PSTAE,
    config: RunConfig,
    *,
    video_id: str = "",
) -> ScoreSeries:
    if len(labels) != len(frames):
        msg = f"{video_id}: {len(labels)} labels for {len(frames)} frames"
        raise ConfigurationError(msg)
    raw = raw_losses(frames, extractor, model, config, video_id=video_id)
    series = score_series(video_id, raw, labels, config.scoring)
    logger.debug(
        "Scored %s: %d frames, max raw loss %.4g", video_id, len(series), raw.max(initial=0)
    )
    return series


# =============================================================================
# CSV
# =============================================================================


def format_scores_csv(series: ScoreSeries) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t in range(len(series)):
        writer.writerow(
            [
                t,
                f"{series.raw_loss[t]:.10g}",
                f"{series.smoothed[t]:.10g}",
                f"{series.score[t]:.10g}",
                int(series.label[t]),
            ]
        )
    return buffer.getvalue()


def write_scores_csv(path: Path, series: ScoreSeries) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_scores_csv(series), encoding="utf-8")


def read_scores_csv(path: Path) -> ScoreSeries:
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise FormatError(path, f"expected header {','.join(CSV_HEADER)}")
        rows = [row for row in reader if row]
    try:
        data = np.asarray(rows, dtype=np.float64).reshape(-1, len(CSV_HEADER))
    except ValueError as exc:
        raise FormatError(path, f"malformed row: {exc}") from None
    return ScoreSeries(
        video_id=path.stem,
        raw_loss=data[:, 1],
        smoothed=data[:, 2],
        score=data[:, 3],
        label=data[:, 4].astype(np.int64),
    )
