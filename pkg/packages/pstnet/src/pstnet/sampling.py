"""Spatial indexing kernels: farthest point sampling, ball query, 3-NN interpolation weights.

All kernels work on exact squared Euclidean distances computed as ``sum((a - b) ** 2)`` so
that their results are reproducible against brute-force scans; candidate ordering uses
stable sorts, so equal distances always resolve to the lowest source index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy import sparse

from pstae_core.errors import ConfigurationError, UsageError

logger = logging.getLogger(__name__)

# Anchors per distance block; bounds the (chunk, N, 3) temporary.
_CHUNK = 256


class FpsSeed(StrEnum):
    FIRST = "first"
    LEXICOGRAPHIC = "lexicographic"


def lexicographic_seed(points: np.ndarray) -> int:
    """Index of the point with the lexicographically smallest (x, y, z)."""
    pts = np.asarray(points)
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))
    return int(order[0])


def resolve_seed(points: np.ndarray, mode: FpsSeed) -> int:
    return lexicographic_seed(points) if mode is FpsSeed.LEXICOGRAPHIC else 0


def fps(points: np.ndarray, n: int, seed_index: int = 0) -> np.ndarray:
    """Greedy farthest point sampling; returns ``n`` distinct indices starting at ``seed_index``."""
    pts = np.asarray(points, dtype=np.float64)
    total = pts.shape[0]
    if not 1 <= n <= total:
        msg = f"fps cannot pick {n} of {total} points; resample the frame first"
        raise UsageError(msg)
    if not 0 <= seed_index < total:
        raise UsageError(f"fps seed_index {seed_index} outside [0, {total})")

    selected = np.empty(n, dtype=np.intp)
    selected[0] = seed_index
    min_dist = np.sum((pts - pts[seed_index]) ** 2, axis=1)
    min_dist[seed_index] = -1.0
    for i in range(1, n):
        nxt = int(np.argmax(min_dist))
        selected[i] = nxt
        np.minimum(min_dist, np.sum((pts - pts[nxt]) ** 2, axis=1), out=min_dist)
        min_dist[nxt] = -1.0
    return selected


@dataclass(frozen=True)
class NeighborTable:
    anchor_indices: np.ndarray
    neighbor_indices: np.ndarray
    degenerate: np.ndarray

    @property
    def num_degenerate(self) -> int:
        return int(self.degenerate.sum())


def _sorted_candidates(
    queries: np.ndarray, source: np.ndarray, keep: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per query, the ``keep`` nearest source indices and their squared distances, ascending."""
    order = np.empty((queries.shape[0], keep), dtype=np.intp)
    dist = np.empty((queries.shape[0], keep), dtype=np.float64)
    for start in range(0, queries.shape[0], _CHUNK):
        block = queries[start : start + _CHUNK]
        d2 = np.sum((block[:, None, :] - source[None, :, :]) ** 2, axis=-1)
        idx = np.argsort(d2, axis=1, kind="stable")[:, :keep]
        order[start : start + len(block)] = idx
        dist[start : start + len(block)] = np.take_along_axis(d2, idx, axis=1)
    return order, dist


def ball_query(anchors: np.ndarray, source: np.ndarray, radius: float, k: int) -> NeighborTable:
    """Up to ``k`` nearest source points within ``radius`` of every anchor.

    Short rows are filled with the nearest qualifying neighbour. An anchor with no source
    point inside the ball gets the globally nearest point in every slot and is flagged
    degenerate.
    """
    if radius <= 0 or k < 1:
        raise ConfigurationError(f"ball_query needs radius > 0 and k >= 1, got {radius}, {k}")
    src = np.asarray(source, dtype=np.float64)
    anc = np.asarray(anchors, dtype=np.float64)
    if src.shape[0] == 0:
        raise UsageError("ball_query on an empty source frame")

    order, dist = _sorted_candidates(anc, src, min(k, src.shape[0]))
    inside = dist <= radius * radius
    nearest = order[:, :1]
    neighbors = np.where(inside, order, nearest)
    if neighbors.shape[1] < k:
        pad = np.repeat(nearest, k - neighbors.shape[1], axis=1)
        neighbors = np.concatenate([neighbors, pad], axis=1)
    degenerate = ~inside[:, 0]
    if degenerate.any():
        logger.debug("ball_query: %d of %d anchors degenerate", degenerate.sum(), len(anc))
    return NeighborTable(
        anchor_indices=np.arange(anc.shape[0], dtype=np.intp),
        neighbor_indices=neighbors,
        degenerate=degenerate,
    )


def three_nn_weights(targets: np.ndarray, anchors: np.ndarray) -> sparse.csr_array:
    """Sparse (targets x anchors) interpolation matrix over the 3 nearest anchors.

    Weights are ``1/d^2`` normalised per row; a target coincident with an anchor takes that
    anchor's value alone. Fewer than 3 anchors means every anchor is used.
    """
    tgt = np.asarray(targets, dtype=np.float64)
    anc = np.asarray(anchors, dtype=np.float64)
    if anc.shape[0] == 0:
        raise UsageError("three_nn_weights needs at least one anchor")
    keep = min(3, anc.shape[0])
    order, dist = _sorted_candidates(tgt, anc, keep)

    coincident = dist[:, 0] == 0.0
    with np.errstate(divide="ignore"):
        weights = np.where(coincident[:, None], 0.0, 1.0 / dist)
    weights[coincident, 0] = 1.0
    weights /= weights.sum(axis=1, keepdims=True)

    rows = np.repeat(np.arange(tgt.shape[0]), keep)
    return sparse.csr_array(
        (weights.reshape(-1), (rows, order.reshape(-1))),
        shape=(tgt.shape[0], anc.shape[0]),
    )
