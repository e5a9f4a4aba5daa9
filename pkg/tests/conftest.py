"""Pytest configuration and fixtures for the PSTAE tests."""

import numpy as np
import pytest

from pcv_data.models import PointFrame
from pstnet.config import ModelConfig

from .builders import TINY_NETWORK


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_network() -> ModelConfig:
    return TINY_NETWORK


@pytest.fixture
def static_video() -> list[PointFrame]:
    """30 frames of one static 5-point cluster inside a single voxel."""
    cluster = np.full((5, 3), 0.025)
    return [PointFrame(points=cluster.copy()) for _ in range(30)]
