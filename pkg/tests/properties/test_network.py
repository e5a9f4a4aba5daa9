"""Property tests for geometric invariances of the extractor and the autoencoder."""

import numpy as np
from hypothesis import given, settings

from pstae.loss import per_frame_loss
from pstae.training import descriptors
from pstae_core.tensor import no_grad
from pstnet.network import build_extractor, build_pstae
from pstnet.sampling import FpsSeed

from ..builders import TINY_NETWORK, moving_blob
from .strategies import offsets, point_clouds, seeds

EXTRACTOR = build_extractor(4, TINY_NETWORK, seed=0)
LEXICOGRAPHIC = build_extractor(
    4, TINY_NETWORK.model_copy(update={"fps_seed": FpsSeed.LEXICOGRAPHIC}), seed=0
)
AUTOENCODER = build_pstae(4, TINY_NETWORK, seed=0)


def _clip_loss(clip):
    target = descriptors(EXTRACTOR, clip)
    with no_grad():
        recon = AUTOENCODER(target)
    return per_frame_loss(target.features, recon.features)


@given(points=point_clouds(min_points=8, max_points=96), offset=offsets())
@settings(max_examples=30, deadline=None)
def test_descriptors_are_translation_invariant(points, offset):
    """Property: translating a frame moves its anchors and keeps its descriptors."""
    clip = points[None]
    base = EXTRACTOR(clip)
    moved = EXTRACTOR(clip + offset)
    np.testing.assert_allclose(moved.coords, base.coords + offset, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(moved.feature_array(), base.feature_array(), atol=1e-9)


@given(points=point_clouds(min_points=8, max_points=96))
@settings(max_examples=30, deadline=None)
def test_lexicographic_descriptors_ignore_point_order(points):
    """Property: with the lexicographic FPS seed, shuffling a frame permutes nothing visible."""
    perm = np.random.default_rng(1).permutation(points.shape[0])
    base = LEXICOGRAPHIC(points[None])
    moved = LEXICOGRAPHIC(points[perm][None])
    np.testing.assert_array_equal(moved.coords, base.coords)
    np.testing.assert_allclose(moved.feature_array(), base.feature_array(), rtol=1e-12)


@given(seed=seeds, offset=offsets())
@settings(max_examples=20, deadline=None)
def test_clip_loss_is_translation_invariant(seed, offset):
    """Property: translating a whole clip leaves every per-frame reconstruction loss unchanged."""
    clip = moving_blob(15, 64, seed=seed)
    base = _clip_loss(clip)
    moved = _clip_loss(clip + offset)
    assert base.shape == (15,)
    np.testing.assert_allclose(moved, base, rtol=1e-9, atol=1e-12)
