"""Property tests for voxel-density background subtraction."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from pcv_data.background import BgsubConfig, bgsub_baseline_score, classify_foreground
from pcv_data.models import PointFrame

from .strategies import voxel_scenes


def _brute_force_background(frames, cfg):
    """Per frame, a boolean mask from counting every point of the block into every voxel."""
    masks = []
    for start in range(0, len(frames), cfg.window_length):
        block = frames[start : start + cfg.window_length]
        keys = [tuple(k) for f in block for k in np.floor(f.points / cfg.voxel_size).astype(int)]
        for frame in block:
            own = [tuple(k) for k in np.floor(frame.points / cfg.voxel_size).astype(int)]
            masks.append(np.array([keys.count(k) > cfg.density_threshold for k in own], bool))
    return masks


@given(
    frames=voxel_scenes(),
    theta=st.integers(min_value=0, max_value=30),
    length=st.integers(min_value=1, max_value=12),
)
@settings(max_examples=100, deadline=None)
def test_matches_brute_force_counting(frames, theta, length):
    """Property: a point is background exactly when its voxel's block density exceeds theta."""
    cfg = BgsubConfig(voxel_size=0.1, window_length=length, density_threshold=theta)
    foreground, background = classify_foreground(frames, cfg)
    for frame, fg, bg, mask in zip(
        frames, foreground, background, _brute_force_background(frames, cfg), strict=True
    ):
        np.testing.assert_array_equal(bg.points, frame.points[mask])
        np.testing.assert_array_equal(fg.points, frame.points[~mask])


@given(frames=voxel_scenes(), theta=st.integers(min_value=0, max_value=30))
@settings(max_examples=100)
def test_foreground_and_background_partition_each_frame(frames, theta):
    """Property: every point lands in exactly one of the two outputs."""
    cfg = BgsubConfig(voxel_size=0.1, density_threshold=theta)
    foreground, background = classify_foreground(frames, cfg)
    assert len(foreground) == len(background) == len(frames)
    for frame, fg, bg in zip(frames, foreground, background, strict=True):
        assert fg.num_points + bg.num_points == frame.num_points


@given(
    frames=voxel_scenes(),
    low=st.integers(min_value=0, max_value=20),
    extra=st.integers(min_value=0, max_value=20),
)
@settings(max_examples=100)
def test_raising_theta_never_shrinks_foreground(frames, low, extra):
    """Property: foreground counts are monotone non-decreasing in theta."""
    loose, _ = classify_foreground(frames, BgsubConfig(voxel_size=0.1, density_threshold=low))
    strict, _ = classify_foreground(
        frames, BgsubConfig(voxel_size=0.1, density_threshold=low + extra)
    )
    for a, b in zip(loose, strict, strict=True):
        assert b.num_points >= a.num_points


@given(frames=voxel_scenes(), scale=st.sampled_from([0.25, 0.5, 2.0, 4.0]))
@settings(max_examples=60)
def test_scaling_scene_and_voxel_together(frames, scale):
    """Property: multiplying coordinates and voxel size by a power of two changes nothing."""
    scaled = [PointFrame(points=f.points * scale) for f in frames]
    base, _ = classify_foreground(frames, BgsubConfig(voxel_size=0.1, density_threshold=3))
    moved, _ = classify_foreground(scaled, BgsubConfig(voxel_size=0.1 * scale, density_threshold=3))
    assert [f.num_points for f in base] == [f.num_points for f in moved]


@given(frames=voxel_scenes(), theta=st.integers(min_value=0, max_value=30))
@settings(max_examples=60)
def test_baseline_flags_frames_with_foreground(frames, theta):
    """Property: the baseline is 1 exactly on frames with a foreground point."""
    foreground, _ = classify_foreground(
        frames, BgsubConfig(voxel_size=0.1, density_threshold=theta)
    )
    score = bgsub_baseline_score(foreground)
    assert score.tolist() == [int(f.num_points > 0) for f in foreground]
