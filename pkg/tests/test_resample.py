"""Tests for per-frame resampling and clip segmentation."""

import numpy as np
import pytest

from pcv_data.models import Clip, PointFrame
from pcv_data.resample import resample_frame, segment_video
from pstae_core.errors import ConfigurationError


def _frame(n, seed=0):
    return PointFrame(points=np.random.default_rng(seed).uniform(size=(n, 3)))


def _rows(points):
    return {tuple(p) for p in points}


class TestResampleFrame:
    def test_exact_count_is_identity(self):
        frame = _frame(2048)
        assert resample_frame(frame, 2048) is frame

    def test_large_frame_becomes_subset(self):
        frame = _frame(3000)
        out = resample_frame(frame, 2048)
        assert out.num_points == 2048
        assert _rows(out.points) <= _rows(frame.points)
        assert len(_rows(out.points)) == 2048

    def test_small_frame_keeps_every_point(self):
        frame = _frame(100)
        out = resample_frame(frame, 2048, rng=np.random.default_rng(3))
        assert out.num_points == 2048
        np.testing.assert_array_equal(out.points[:100], frame.points)
        assert _rows(out.points) == _rows(frame.points)

    def test_duplicates_are_seeded(self):
        frame = _frame(10)
        a = resample_frame(frame, 64, rng=np.random.default_rng(5))
        b = resample_frame(frame, 64, rng=np.random.default_rng(5))
        np.testing.assert_array_equal(a.points, b.points)

    def test_empty_frame_stays_empty(self):
        assert resample_frame(PointFrame.empty(), 2048).is_empty

    def test_rejects_non_positive_target(self):
        with pytest.raises(ConfigurationError):
            resample_frame(_frame(4), 0)


class TestSegmentVideo:
    def test_exact_multiple(self):
        clips = segment_video([_frame(4, i) for i in range(45)], 15, pad_tail=False)
        assert [c.start_frame_index for c in clips] == [0, 15, 30]
        assert all(c.num_real_frames == 15 for c in clips)

    def test_drops_short_tail(self):
        clips = segment_video([_frame(4, i) for i in range(44)], 15, pad_tail=False)
        assert len(clips) == 2

    def test_pads_short_tail_with_last_frame(self):
        video = [_frame(4, i) for i in range(44)]
        clips = segment_video(video, 15, pad_tail=True, video_id="v")
        assert len(clips) == 3
        tail = clips[-1]
        assert tail.padded == (False,) * 14 + (True,)
        assert tail.frames[-1] is video[-1]
        assert tail.source_video_id == "v"
        assert list(tail.frame_indices) == list(range(30, 45))

    def test_rejects_non_positive_length(self):
        with pytest.raises(ConfigurationError):
            segment_video([], 0, pad_tail=False)

    def test_clip_array_needs_equal_counts(self):
        clip = Clip(frames=(_frame(3), _frame(4)), source_video_id="v", start_frame_index=0)
        with pytest.raises(ConfigurationError, match="differing point counts"):
            clip.as_array()
