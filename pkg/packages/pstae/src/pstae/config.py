"""Run configuration: one settings object composing every stage's model.

Values come from the field defaults (which reproduce the published setup), then a TOML, JSON or
YAML file, then ``PSTAE_``-prefixed environment variables with ``__`` between nesting levels
(``PSTAE_SGD__EPOCHS=3``). Keyword arguments given to ``RunConfig`` directly, which is how file
values arrive, take precedence over the environment.
"""

from __future__ import annotations

import json
import tomllib
from enum import StrEnum
from pathlib import Path

import yaml
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings

from pcv_data.background import BgsubConfig
from pcv_data.synthetic.dataset import DatasetSpec
from pstae_core.errors import ConfigurationError
from pstae_core.optim import SgdConfig
from pstnet.config import ModelConfig

SMOOTHING_WINDOW = 10
MIN_FOREGROUND_POINTS = 16


class SmoothOrder(StrEnum):
    PRE_NORM = "pre-norm"
    POST_NORM = "post-norm"


class ScoringConfig(BaseModel):
    window: int = Field(
        default=SMOOTHING_WINDOW, ge=1, description="Trailing moving-average length in frames"
    )
    smooth_order: SmoothOrder = Field(
        default=SmoothOrder.PRE_NORM,
        description="Smooth raw losses before min-max normalization, or smooth the scores after",
    )


class DataConfig(BaseModel):
    root: Path = Field(default=Path("data"), description="Dataset directory with manifest.json")
    runs: Path = Field(default=Path("runs"), description="Checkpoints, reports and scores")
    min_foreground_points: int = Field(
        default=MIN_FOREGROUND_POINTS,
        ge=1,
        description="Frames with fewer foreground points are treated as empty",
    )
    synthetic: DatasetSpec = Field(
        default_factory=DatasetSpec, description="What gen-data writes into root"
    )


class PretrainConfig(BaseModel):
    sgd: SgdConfig = Field(
        default_factory=lambda: SgdConfig(epochs=30, decay_epoch=20),
        description="Optimizer settings for the extractor + action head",
    )
    hidden_channels: int = Field(default=64, ge=1, description="Action head hidden width")


class RunConfig(BaseSettings):
    """Everything one experiment needs; defaults are the published hyperparameters."""

    model_config = {"env_prefix": "PSTAE_", "env_nested_delimiter": "__"}

    bgsub: BgsubConfig = Field(default_factory=BgsubConfig)
    network: ModelConfig = Field(default_factory=ModelConfig)
    sgd: SgdConfig = Field(default_factory=SgdConfig)
    pretrain: PretrainConfig = Field(default_factory=PretrainConfig)
    scoring: ScoringConfig = Field(default_factory=ScoringConfig)
    data: DataConfig = Field(default_factory=DataConfig)
    seed: int = Field(default=0, description="Seed for weight init, batching and resampling")
    max_steps: int | None = Field(
        default=None, ge=1, description="Stop training after this many SGD steps"
    )

    @property
    def extractor_path(self) -> Path:
        return self.data.runs / f"extractor_f{self.network.descriptor_dim}.pstw"

    @property
    def pstae_path(self) -> Path:
        return self.data.runs / f"pstae_f{self.network.descriptor_dim}.pstw"

    @property
    def scores_dir(self) -> Path:
        return self.data.runs / f"scores_f{self.network.descriptor_dim}"


def _read_config_file(path: Path) -> dict:
    text = path.read_text(encoding="utf-8")
    match path.suffix.lower():
        case ".toml":
            data = tomllib.loads(text)
        case ".json":
            data = json.loads(text)
        case ".yaml" | ".yml":
            data = yaml.safe_load(text) or {}
        case suffix:
            raise ConfigurationError(f"unsupported config format '{suffix}' for {path}")
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path}: top level must be a mapping")
    return data


def load_run_config(path: Path | None = None, **overrides: object) -> RunConfig:
    data = _read_config_file(path) if path is not None else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**data)
