"""Tests for SGD with a single step decay."""

import numpy as np
import pytest
from pydantic import ValidationError

from pstae_core import DTensor, SgdConfig, sgd_step
from pstae_core.errors import FrozenParameterError, UsageError


def _param(value, grad=None, name="p"):
    p = DTensor([value], requires_grad=True, name=name)
    p.grad = None if grad is None else np.array([grad])
    return p


class TestSchedule:
    def test_defaults_match_published_setup(self):
        config = SgdConfig()
        assert config.learning_rate == 0.01
        assert config.epochs == 15
        assert config.batch_size == 8

    def test_decays_at_tenth_epoch(self):
        config = SgdConfig()
        assert config.learning_rate_at(9) == pytest.approx(0.01)
        assert config.learning_rate_at(10) == pytest.approx(0.001)
        assert config.learning_rate_at(15) == pytest.approx(0.001)

    def test_decay_factor_must_be_a_fraction(self):
        with pytest.raises(ValidationError):
            SgdConfig(decay_factor=0.0)
        with pytest.raises(ValidationError):
            SgdConfig(decay_factor=1.5)


class TestStep:
    def test_single_update(self):
        p = _param(1.0, 2.0)
        lr = sgd_step([p], SgdConfig(), epoch=1)
        assert lr == pytest.approx(0.01)
        assert p.data[0] == pytest.approx(0.98)
        assert p.grad is None

    def test_decayed_update(self):
        p = _param(1.0, 2.0)
        sgd_step([p], SgdConfig(), epoch=10)
        assert p.data[0] == pytest.approx(0.998)

    def test_zero_gradient_leaves_parameter(self):
        p = _param(1.0, 0.0)
        sgd_step([p], SgdConfig(), epoch=1)
        assert p.data[0] == 1.0

    def test_frozen_parameter_is_refused_before_any_update(self):
        live = _param(1.0, 2.0, name="live")
        frozen = _param(1.0, 2.0, name="frozen")
        frozen.frozen = True
        with pytest.raises(FrozenParameterError, match="frozen"):
            sgd_step([live, frozen], SgdConfig(), epoch=1)
        assert live.data[0] == 1.0

    def test_missing_gradient_is_a_usage_error(self):
        with pytest.raises(UsageError, match="backward"):
            sgd_step([_param(1.0)], SgdConfig(), epoch=1)
