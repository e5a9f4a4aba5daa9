"""Hypothesis strategies for point clouds, score vectors and voxel scenes.

Coordinates are drawn on a coarse lattice plus a fixed irrational offset so that no point ever
sits exactly on a voxel boundary or ties another point's distance by accident.
"""

import numpy as np
from hypothesis import strategies as st

from pcv_data.models import PointFrame

# =============================================================================
# POINT CLOUDS
# =============================================================================

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def point_clouds(draw, min_points=1, max_points=256):
    """(N, 3) float64 array of continuous coordinates in [-1, 1)."""
    n = draw(st.integers(min_value=min_points, max_value=max_points))
    rng = np.random.default_rng(draw(seeds))
    return rng.uniform(-1.0, 1.0, size=(n, 3))


@st.composite
def ball_queries(draw):
    """(anchors, source, radius, k) with anchors drawn from the source frame."""
    source = draw(point_clouds(min_points=2, max_points=256))
    count = draw(st.integers(min_value=1, max_value=min(32, source.shape[0])))
    picks = np.random.default_rng(draw(seeds)).choice(source.shape[0], count, replace=False)
    radius = draw(st.floats(min_value=0.05, max_value=1.5))
    k = draw(st.integers(min_value=1, max_value=12))
    return source[picks], source, radius, k


@st.composite
def offsets(draw):
    return np.array(
        [draw(st.floats(min_value=-20.0, max_value=20.0, allow_nan=False)) for _ in range(3)]
    )


# =============================================================================
# VOXEL SCENES
# =============================================================================


@st.composite
def voxel_scenes(draw, max_frames=12):
    """Frames whose points cluster in a few lattice cells, some static and some moving."""
    rng = np.random.default_rng(draw(seeds))
    num_frames = draw(st.integers(min_value=1, max_value=max_frames))
    static = rng.integers(0, 6, size=(draw(st.integers(0, 6)), 3))
    frames = []
    for _ in range(num_frames):
        moving = rng.integers(0, 6, size=(draw(st.integers(0, 4)), 3))
        cells = np.concatenate([static, moving]).astype(np.float64)
        repeats = int(rng.integers(1, 4))
        points = np.repeat(cells, repeats, axis=0) * 0.1 + 0.0317
        points += rng.uniform(0.0, 0.03, size=points.shape)
        frames.append(PointFrame(points=points.reshape(-1, 3)))
    return frames


# =============================================================================
# SCORES AND LABELS
# =============================================================================


@st.composite
def scored_labels(draw, max_size=200):
    """(scores, labels) with both classes present; scores may contain ties."""
    n = draw(st.integers(min_value=2, max_value=max_size))
    rng = np.random.default_rng(draw(seeds))
    labels = rng.integers(0, 2, size=n)
    labels[0], labels[1] = 0, 1
    levels = draw(st.integers(min_value=2, max_value=50))
    scores = rng.integers(0, levels, size=n) / levels
    return scores.astype(np.float64), labels.astype(np.int64)


@st.composite
def loss_series(draw, max_size=120):
    """Non-negative per-frame raw losses."""
    n = draw(st.integers(min_value=1, max_value=max_size))
    rng = np.random.default_rng(draw(seeds))
    return rng.exponential(5.0, size=n)


@st.composite
def descriptor_pairs(draw, max_frames=6, max_anchors=40, max_channels=32):
    """Target and reconstruction arrays of identical (L, A, f) shape."""
    shape = (
        draw(st.integers(min_value=1, max_value=max_frames)),
        draw(st.integers(min_value=1, max_value=max_anchors)),
        draw(st.integers(min_value=1, max_value=max_channels)),
    )
    rng = np.random.default_rng(draw(seeds))
    return rng.normal(size=shape), rng.normal(size=shape)
