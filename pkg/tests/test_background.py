"""Tests for voxel-density background subtraction and the BGsub baseline."""

import numpy as np
import pytest
from pydantic import ValidationError

from pcv_data.background import (
    BackgroundWindow,
    BgsubConfig,
    bgsub_baseline_score,
    build_density_grid,
    classify_foreground,
    voxel_keys,
)
from pcv_data.models import PointFrame


def _static_with_actor(num_frames=30, actor_frames=range(10, 21)):
    wall = np.full((5, 3), 0.025)
    video = []
    for t in range(num_frames):
        points = wall
        if t in actor_frames:
            actor = np.array([[1.0 + 0.2 * t, 1.0, 1.0]])
            points = np.concatenate([wall, actor])
        video.append(PointFrame(points=points))
    return video


class TestDensityGrid:
    def test_voxel_keys_floor(self):
        keys = voxel_keys(np.array([[0.049, -0.001, 0.1]]), 0.05)
        np.testing.assert_array_equal(keys, [[0, -1, 2]])

    def test_counts_over_window(self, static_video):
        grid = build_density_grid(static_video, 0.05)
        assert len(grid) == 1
        assert grid.density((0, 0, 0)) == 150
        assert grid.density((1, 0, 0)) == 0

    def test_thirty_frames_of_one_point(self):
        video = [PointFrame(points=[[0.01, 0.01, 0.01]]) for _ in range(30)]
        assert build_density_grid(video, 0.05).density((0, 0, 0)) == 30

    def test_empty_window(self):
        assert len(build_density_grid([PointFrame.empty()] * 3, 0.05)) == 0


class TestClassifyForeground:
    def test_dense_voxel_is_background(self, static_video):
        foreground, background = classify_foreground(static_video, BgsubConfig())
        assert all(f.is_empty for f in foreground)
        assert all(b.num_points == 5 for b in background)

    def test_sparse_voxel_is_foreground(self):
        video = [PointFrame(points=[[0.01, 0.01, 0.01]]) for _ in range(30)]
        foreground, _ = classify_foreground(video, BgsubConfig())
        assert all(f.num_points == 1 for f in foreground)

    def test_moving_point_is_foreground(self):
        foreground, background = classify_foreground(_static_with_actor(), BgsubConfig())
        for t, (fg, bg) in enumerate(zip(foreground, background, strict=True)):
            assert bg.num_points == 5
            assert fg.num_points == (1 if 10 <= t <= 20 else 0)

    def test_zero_threshold_makes_every_point_background(self):
        video = [PointFrame(points=[[0.01, 0.01, 0.01]]) for _ in range(3)]
        foreground, _ = classify_foreground(video, BgsubConfig(density_threshold=0))
        assert all(f.is_empty for f in foreground)

    def test_block_windows_are_independent(self):
        # 40 frames of 3 points: the first block has D=90, the 10-frame tail has D=30.
        video = [PointFrame(points=np.full((3, 3), 0.01)) for _ in range(40)]
        cfg = BgsubConfig(density_threshold=50)
        foreground, _ = classify_foreground(video, cfg)
        assert [f.num_points for f in foreground] == [0] * 30 + [3] * 10

        whole = cfg.model_copy(update={"window": BackgroundWindow.WHOLE_VIDEO})
        foreground, _ = classify_foreground(video, whole)
        assert all(f.is_empty for f in foreground)

    def test_point_order_preserved(self):
        points = np.array([[0.3, 0.0, 0.0], [0.01, 0.01, 0.01], [0.9, 0.0, 0.0]])
        video = [PointFrame(points=points)] + [PointFrame(points=points[1:2])] * 29
        foreground, _ = classify_foreground(video, BgsubConfig(density_threshold=20))
        np.testing.assert_array_equal(foreground[0].points, points[[0, 2]])

    def test_rejects_non_positive_voxel(self):
        with pytest.raises(ValidationError):
            BgsubConfig(voxel_size=0.0)


class TestBaselineScore:
    def test_static_scene_scores_zero(self, static_video):
        foreground, _ = classify_foreground(static_video, BgsubConfig())
        np.testing.assert_array_equal(bgsub_baseline_score(foreground), np.zeros(30))

    def test_actor_frames_score_one(self):
        foreground, _ = classify_foreground(_static_with_actor(), BgsubConfig())
        expected = np.zeros(30, dtype=np.int64)
        expected[10:21] = 1
        np.testing.assert_array_equal(bgsub_baseline_score(foreground), expected)

    def test_empty_video(self):
        assert bgsub_baseline_score([]).shape == (0,)
