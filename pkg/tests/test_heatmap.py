"""Tests for per-anchor heat maps and their PLY export."""

import numpy as np

from pcv_data.formats import read_ply
from pstae.heatmap import HeatMap, export_heatmap, heatmap
from pstae.loss import per_frame_loss
from pstae.training import descriptors
from pstnet.network import build_extractor, build_pstae

from .builders import moving_blob


class TestHeatMap:
    def test_frame_totals_match_frame_loss(self, tiny_network):
        extractor = build_extractor(4, tiny_network, seed=0)
        model = build_pstae(4, tiny_network, seed=0)
        points = moving_blob(15, 64, seed=1)
        heat = heatmap(points, extractor, model)
        assert heat.coords.shape == (15, 32, 3)
        assert heat.errors.shape == (15, 32)
        assert np.all(heat.errors >= 0)

        target = descriptors(extractor, points)
        recon = model(target)
        expected = per_frame_loss(target.features, recon.features)
        np.testing.assert_allclose(heat.frame_totals(), expected, rtol=1e-10)

    def test_anchors_are_descriptor_coordinates(self, tiny_network):
        extractor = build_extractor(4, tiny_network, seed=0)
        points = moving_blob(15, 64, seed=1)
        heat = heatmap(points, extractor, build_pstae(4, tiny_network, seed=0))
        np.testing.assert_array_equal(heat.coords, extractor(points).coords)


class TestExport:
    def test_one_file_per_real_frame(self, tmp_path, rng):
        heat = HeatMap(coords=rng.uniform(size=(3, 4, 3)), errors=rng.exponential(size=(3, 4)))
        paths = export_heatmap(tmp_path, "test-0002", heat, start_frame=30, num_real_frames=2)
        assert [p.name for p in paths] == ["test-0002_00030.ply", "test-0002_00031.ply"]
        xyz, err = read_ply(paths[1])
        np.testing.assert_allclose(xyz, heat.coords[1], atol=1e-6)
        np.testing.assert_allclose(err, heat.errors[1], rtol=1e-8)

    def test_zero_errors(self, tmp_path):
        heat = HeatMap(coords=np.zeros((1, 2, 3)), errors=np.zeros((1, 2)))
        (path,) = export_heatmap(tmp_path, "v", heat)
        _, err = read_ply(path)
        np.testing.assert_array_equal(err, [0.0, 0.0])
