"""Tests for network assembly, the architecture dump and the action head."""

import numpy as np
import pytest
from pydantic import ValidationError

from pstae_core.errors import ConfigurationError
from pstnet.config import EXTRACTOR, ModelConfig
from pstnet.network import (
    PARAMETER_TOLERANCE,
    PSTAE,
    ActionHead,
    ActionNet,
    Extractor,
    architecture,
    build_extractor,
    build_pstae,
)
from pstnet.sampling import FpsSeed

from .builders import mini_autoencoder_layers, moving_blob

EXPECTED_SHAPES = [
    ("extractor", (15, 2048, 0), (15, 1024, 8)),
    ("encoder2", (15, 1024, 8), (7, 512, 64)),
    ("encoder3", (7, 512, 64), (7, 512, 256)),
    ("encoder4", (7, 512, 256), (3, 256, 512)),
    ("encoder5", (3, 256, 512), (3, 128, 1024)),
    ("decoder5", (3, 128, 1024), (3, 256, 512)),
    ("decoder4", (3, 256, 512), (7, 512, 256)),
    ("decoder3", (7, 512, 256), (7, 512, 64)),
    ("decoder2", (7, 512, 64), (15, 1024, 8)),
]


class TestArchitecture:
    def test_reference_shape_chain(self):
        report = architecture(ModelConfig())
        observed = [(layer.name, layer.input_shape, layer.output_shape) for layer in report.layers]
        assert observed == EXPECTED_SHAPES

    def test_parameter_count_matches_built_model(self):
        report = architecture(ModelConfig())
        assert report.pstae_parameters == build_pstae(8).parameter_count()
        assert report.extractor_parameters == build_extractor(8).parameter_count()

    def test_parameter_count_near_reference(self):
        report = architecture(ModelConfig())
        assert report.within_tolerance
        assert abs(report.relative_deviation) < 0.05
        assert PARAMETER_TOLERANCE == 0.5

    @pytest.mark.parametrize("f", [4, 16, 32])
    def test_terminal_width_follows_descriptor_dim(self, f):
        report = architecture(ModelConfig(descriptor_dim=f))
        assert report.layers[0].output_shape[2] == f
        assert report.layers[-1].output_shape == (15, 1024, f)


class TestBuilders:
    def test_f4_terminal_width(self, tiny_network):
        model = build_pstae(4, tiny_network)
        assert model.decoders[-1].spatial.out_features == 4
        assert model.encoders[0].in_channels == 4

    def test_rejects_unsupported_descriptor_dim(self):
        with pytest.raises(ConfigurationError, match="descriptor dimension"):
            build_extractor(5)
        with pytest.raises(ConfigurationError):
            build_pstae(64)

    def test_model_config_rejects_unsupported_descriptor_dim(self):
        with pytest.raises(ValidationError):
            ModelConfig(descriptor_dim=5)

    def test_model_config_rejects_unknown_override(self):
        with pytest.raises(ValidationError, match="Unknown layer overrides"):
            ModelConfig(layers={"encoder9": EXTRACTOR})

    def test_same_seed_same_weights(self, tiny_network):
        a = build_pstae(4, tiny_network, seed=3).state_dict()
        b = build_pstae(4, tiny_network, seed=3).state_dict()
        assert a.keys() == b.keys()
        for name in a:
            np.testing.assert_array_equal(a[name], b[name])

    def test_channel_scale_keeps_widths_positive(self, tiny_network):
        for layer in tiny_network.encoder_layers() + tiny_network.decoder_layers():
            assert layer.c_s >= 1
            assert layer.c_t >= 1
        assert tiny_network.decoder_layers()[-1].c_s == tiny_network.descriptor_dim


class TestExtractor:
    def test_descriptor_shape(self):
        points = np.random.default_rng(0).uniform(0.0, 2.0, size=(15, 2048, 3))
        out = build_extractor(8, seed=0)(points)
        assert out.coords.shape == (15, 1024, 3)
        assert out.feature_array().shape == (15, 1024, 8)

    def test_rejects_temporal_aggregation(self):
        config = EXTRACTOR.model_copy(update={"r_t": 1})
        with pytest.raises(ConfigurationError, match="must not aggregate over time"):
            Extractor(config, rng=np.random.default_rng(0))

    def test_frames_are_processed_independently(self, tiny_network):
        extractor = build_extractor(4, tiny_network, seed=1)
        points = moving_blob(6, 64, seed=2)
        perm = np.array([3, 0, 5, 1, 4, 2])
        base = extractor(points).feature_array()
        shuffled = extractor(points[perm]).feature_array()
        np.testing.assert_allclose(shuffled, base[perm], rtol=1e-12)


class TestAutoencoder:
    def test_output_lands_on_descriptor_coordinates(self, tiny_network):
        points = moving_blob(15, 64, seed=0)
        descriptors = build_extractor(4, tiny_network, seed=0)(points)
        out = build_pstae(4, tiny_network, seed=0)(descriptors)
        np.testing.assert_array_equal(out.coords, descriptors.coords)
        assert out.feature_array().shape == descriptors.feature_array().shape == (15, 32, 4)

    def test_rejects_mismatched_stacks(self):
        encoders, decoders = mini_autoencoder_layers()
        with pytest.raises(ConfigurationError, match="matching"):
            PSTAE(encoders, decoders[:1], 2, rng=np.random.default_rng(0))

    def test_rejects_terminal_width_mismatch(self):
        encoders, decoders = mini_autoencoder_layers(in_channels=2)
        with pytest.raises(ConfigurationError, match="terminal decoder width"):
            PSTAE(encoders, decoders, 3, rng=np.random.default_rng(0))


class TestActionHead:
    def test_logits_shape(self, tiny_network):
        net = ActionNet(
            build_extractor(4, tiny_network, seed=0),
            ActionHead(4, 2, rng=np.random.default_rng(0)),
        )
        logits = net(moving_blob(15, 64))
        assert logits.shape == (2,)

    def test_needs_a_class(self):
        with pytest.raises(ConfigurationError):
            ActionHead(4, 0, rng=np.random.default_rng(0))

    def test_point_order_does_not_matter(self, tiny_network):
        config = tiny_network.model_copy(update={"fps_seed": FpsSeed.LEXICOGRAPHIC})
        net = ActionNet(
            build_extractor(4, config, seed=0),
            ActionHead(4, 3, rng=np.random.default_rng(0)),
        )
        points = moving_blob(15, 64, seed=4)
        perm = np.random.default_rng(9).permutation(64)
        base = net(points).data
        shuffled = net(points[:, perm]).data
        np.testing.assert_allclose(shuffled, base, rtol=1e-12)
