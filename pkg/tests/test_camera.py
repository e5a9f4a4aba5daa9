"""Tests for depth back-projection and depth image loading."""

import cv2
import numpy as np
import pytest
from pydantic import ValidationError

from pcv_data.camera import (
    CameraIntrinsics,
    depth_to_pointcloud,
    load_depth_png,
    load_intrinsics,
    project,
)
from pstae_core.errors import FormatError

INTRINSICS = CameraIntrinsics(fx=100.0, fy=100.0, cx=32.0, cy=24.0)


class TestDepthToPointcloud:
    def test_principal_point_lies_on_the_axis(self):
        depth = np.zeros((48, 160), dtype=np.uint16)
        depth[24, 32] = 1000
        frame = depth_to_pointcloud(depth, INTRINSICS)
        np.testing.assert_allclose(frame.points, [[0.0, 0.0, 1.0]])

    def test_one_focal_length_off_axis(self):
        depth = np.zeros((48, 160), dtype=np.uint16)
        depth[24, 132] = 1000
        frame = depth_to_pointcloud(depth, INTRINSICS)
        np.testing.assert_allclose(frame.points, [[1.0, 0.0, 1.0]])

    def test_zero_depth_gives_empty_frame(self):
        frame = depth_to_pointcloud(np.zeros((48, 64), dtype=np.uint16), INTRINSICS)
        assert frame.is_empty

    def test_row_major_order(self):
        depth = np.zeros((48, 64), dtype=np.uint16)
        depth[30, 5] = 2000
        depth[10, 40] = 1500
        frame = depth_to_pointcloud(depth, INTRINSICS)
        np.testing.assert_allclose(frame.points[:, 2], [1.5, 2.0])

    def test_project_inverts_back_projection(self, rng):
        depth = rng.integers(0, 4000, size=(48, 64)).astype(np.uint16)
        frame = depth_to_pointcloud(depth, INTRINSICS)
        u, v = project(frame.points, INTRINSICS)
        rows, cols = np.nonzero(depth > 0)
        np.testing.assert_allclose(u, cols, atol=1e-9)
        np.testing.assert_allclose(v, rows, atol=1e-9)

    def test_intrinsics_need_positive_focal_length(self):
        with pytest.raises(ValidationError):
            CameraIntrinsics(fx=0.0, fy=100.0, cx=0.0, cy=0.0)


class TestLoading:
    def test_sixteen_bit_png_round_trip(self, tmp_path):
        depth = np.zeros((48, 64), dtype=np.uint16)
        depth[24, 32] = 4321
        path = tmp_path / "depth.png"
        cv2.imwrite(str(path), depth)
        loaded = load_depth_png(path)
        assert loaded.dtype == np.uint16
        np.testing.assert_array_equal(loaded, depth)

    def test_unreadable_image(self, tmp_path):
        path = tmp_path / "broken.png"
        path.write_bytes(b"not an image")
        with pytest.raises(FormatError, match="not a readable image"):
            load_depth_png(path)

    def test_colour_image_rejected(self, tmp_path):
        path = tmp_path / "colour.png"
        cv2.imwrite(str(path), np.zeros((8, 8, 3), dtype=np.uint8))
        with pytest.raises(FormatError, match="single-channel"):
            load_depth_png(path)

    def test_intrinsics_json(self, tmp_path):
        path = tmp_path / "intrinsics.json"
        path.write_text(INTRINSICS.model_dump_json())
        assert load_intrinsics(path) == INTRINSICS
