"""Frame-level AUROC, ROC point lists, and the per-category evaluation report."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field
from scipy.stats import rankdata
from sklearn.metrics import roc_curve

from pcv_data.formats import NORMAL_CATEGORY
from pstae_core.errors import ConfigurationError, SingleClassError

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from pstae.scoring import ScoreSeries

logger = logging.getLogger(__name__)


def _check_binary(scores: np.ndarray, labels: np.ndarray) -> None:
    if scores.shape != labels.shape or scores.ndim != 1:
        msg = f"scores {scores.shape} and labels {labels.shape} must be equal-length vectors"
        raise ConfigurationError(msg)
    if not np.isin(labels, (0, 1)).all():
        raise ConfigurationError("labels must be 0 or 1")
    present = np.unique(labels)
    if present.size < 2:
        raise SingleClassError(int(present[0]) if present.size else 0)


def auroc(scores: Sequence[float] | np.ndarray, labels: Sequence[int] | np.ndarray) -> float:
    """Probability that a random positive outranks a random negative, ties counting one half."""
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    _check_binary(s, y)
    ranks = rankdata(s, method="average")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


class RocCurve(BaseModel):
    fpr: list[float]
    tpr: list[float]
    thresholds: list[float] = Field(
        description="Descending; the leading 'nothing flagged' threshold is max score + 1"
    )
    auroc: float


def roc_points(
    scores: Sequence[float] | np.ndarray, labels: Sequence[int] | np.ndarray
) -> RocCurve:
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    _check_binary(s, y)
    fpr, tpr, thresholds = roc_curve(y, s, drop_intermediate=False)
    thresholds = np.where(np.isfinite(thresholds), thresholds, s.max() + 1.0)
    return RocCurve(
        fpr=fpr.tolist(), tpr=tpr.tolist(), thresholds=thresholds.tolist(), auroc=auroc(s, y)
    )


# =============================================================================
# Report
# =============================================================================


class EvaluationReport(BaseModel):
    auroc: float | None = Field(description="Frame-level AUROC over every scored frame")
    per_category: dict[str, float | None] = Field(
        default_factory=dict,
        description="AUROC of each anomaly category's frames pooled with all normal videos",
    )
    bgsub_auroc: float | None = Field(
        default=None, description="Same frames scored by the foreground-presence baseline"
    )
    bgsub_per_category: dict[str, float | None] = Field(default_factory=dict)
    num_frames: int
    num_videos: int
    errors: list[str] = Field(default_factory=list, description="Undefined AUROC entries")


def _safe_auroc(
    name: str, scores: np.ndarray, labels: np.ndarray, errors: list[str]
) -> float | None:
    try:
        return auroc(scores, labels)
    except SingleClassError as exc:
        errors.append(f"{name}: {exc}")
        logger.warning("AUROC undefined for %s: %s", name, exc)
        return None


def evaluate(
    series: Sequence[ScoreSeries],
    categories: Mapping[str, str],
    bgsub: Mapping[str, np.ndarray] | None = None,
) -> EvaluationReport:
    """Pool every video's frames into one AUROC, then one per anomaly category.

    A category's AUROC uses that category's videos plus every ``normal`` video. ``bgsub`` maps
    video ids to 0/1 baseline scores of the same frames.
    """
    ordered = sorted(series, key=lambda s: s.video_id)
    errors: list[str] = []

    def pooled(videos: Sequence[ScoreSeries], baseline: bool) -> tuple[np.ndarray, np.ndarray]:
        if not videos:
            return np.zeros(0), np.zeros(0, dtype=np.int64)
        if baseline:
            assert bgsub is not None
            scores = np.concatenate([np.asarray(bgsub[v.video_id], dtype=float) for v in videos])
        else:
            scores = np.concatenate([v.score for v in videos])
        return scores, np.concatenate([v.label for v in videos])

    if bgsub is not None:
        missing = [v.video_id for v in ordered if v.video_id not in bgsub]
        if missing:
            raise ConfigurationError(f"no baseline scores for videos {missing}")
        for v in ordered:
            if np.asarray(bgsub[v.video_id]).shape[0] != len(v):
                msg = f"{v.video_id}: baseline has {len(bgsub[v.video_id])} frames, scores {len(v)}"
                raise ConfigurationError(msg)

    overall = _safe_auroc("total", *pooled(ordered, False), errors)
    overall_bg = _safe_auroc("bgsub total", *pooled(ordered, True), errors) if bgsub else None

    normal = [v for v in ordered if categories.get(v.video_id, NORMAL_CATEGORY) == NORMAL_CATEGORY]
    per_category: dict[str, float | None] = {}
    per_category_bg: dict[str, float | None] = {}
    present = {categories.get(v.video_id, NORMAL_CATEGORY) for v in ordered}
    names = sorted(present - {NORMAL_CATEGORY})
    for name in names:
        group = [v for v in ordered if categories.get(v.video_id) == name] + normal
        per_category[name] = _safe_auroc(name, *pooled(group, False), errors)
        if bgsub is not None:
            per_category_bg[name] = _safe_auroc(f"bgsub {name}", *pooled(group, True), errors)

    return EvaluationReport(
        auroc=overall,
        per_category=per_category,
        bgsub_auroc=overall_bg,
        bgsub_per_category=per_category_bg,
        num_frames=sum(len(v) for v in ordered),
        num_videos=len(ordered),
        errors=errors,
    )
