"""Tests for the clip reconstruction loss and its per-frame and per-anchor views."""

import numpy as np
import pytest

from pstae.loss import anchor_errors, frame_terms, per_frame_loss, reconstruction_loss
from pstae_core import DTensor
from pstae_core.errors import ShapeMismatchError


class TestReconstructionLoss:
    def test_single_frame(self):
        target = [np.zeros((2, 3))]
        recon = [np.array([[1.0, 2.0, 3.0], [4.0, 0.0, 0.0]])]
        assert reconstruction_loss(target, recon).item() == pytest.approx(30.0)

    def test_mean_over_frames(self):
        target = [np.zeros((1, 2)), np.zeros((1, 2))]
        recon = [np.array([[np.sqrt(30.0), 0.0]]), np.array([[1.0, 3.0]])]
        assert per_frame_loss(target, recon) == pytest.approx([30.0, 10.0])
        assert reconstruction_loss(target, recon).item() == pytest.approx(20.0)

    def test_identical_inputs_give_zero(self, rng):
        frames = [rng.normal(size=(5, 4)) for _ in range(3)]
        assert reconstruction_loss(frames, frames).item() == 0.0

    def test_not_divided_by_anchor_count(self):
        one = reconstruction_loss([np.zeros((1, 1))], [np.ones((1, 1))]).item()
        many = reconstruction_loss([np.zeros((50, 1))], [np.ones((50, 1))]).item()
        assert many == 50 * one

    def test_matches_naive_loop(self, rng):
        target = [rng.normal(size=(7, 3)) for _ in range(4)]
        recon = [rng.normal(size=(7, 3)) for _ in range(4)]
        naive = 0.0
        for t, r in zip(target, recon, strict=True):
            for j in range(7):
                for c in range(3):
                    naive += (t[j, c] - r[j, c]) ** 2
        assert reconstruction_loss(target, recon).item() == pytest.approx(naive / 4, rel=1e-12)

    def test_gradient_flows_to_reconstruction(self):
        recon = DTensor([[1.0, 2.0]], requires_grad=True)
        reconstruction_loss([np.zeros((1, 2))], [recon]).backward()
        np.testing.assert_allclose(recon.grad, [[2.0, 4.0]])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            frame_terms([np.zeros((2, 3))], [np.zeros((2, 4))])

    def test_rejects_frame_count_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            frame_terms([np.zeros((2, 3))] * 2, [np.zeros((2, 3))])

    def test_rejects_empty_clip(self):
        with pytest.raises(ShapeMismatchError):
            frame_terms([], [])


class TestAnchorErrors:
    def test_rows_sum_to_frame_loss(self, rng):
        target = [rng.normal(size=(6, 4)) for _ in range(3)]
        recon = [rng.normal(size=(6, 4)) for _ in range(3)]
        errors = anchor_errors(target, recon)
        assert errors.shape == (3, 6)
        np.testing.assert_allclose(errors.sum(axis=1), per_frame_loss(target, recon), rtol=1e-12)

    def test_error_is_local_to_the_changed_anchor(self, rng):
        target = [rng.normal(size=(6, 4))]
        recon = [target[0].copy()]
        recon[0][2] += 1.0
        errors = anchor_errors(target, recon)
        expected = np.zeros((1, 6))
        expected[0, 2] = 4.0
        np.testing.assert_allclose(errors, expected, atol=1e-12)
