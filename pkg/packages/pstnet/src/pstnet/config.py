"""Layer hyperparameters and the built-in architecture presets.

The presets reproduce the autoencoder table row by row: one extractor row, four encoder rows
(PSTOp) and four decoder rows (PSTTransOp). Encoder radii are multiples of the initial ball
query radius ``r0``; decoders have no spatial radius or stride because they interpolate onto
skip coordinates instead of sampling.
"""

from __future__ import annotations

from enum import StrEnum
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, model_validator

from pstae_core.errors import ConfigurationError
from pstnet.sampling import FpsSeed

R0 = 0.5
NEIGHBORS = 9
DESCRIPTOR_DIMS = (4, 8, 16, 32)
DEFAULT_DESCRIPTOR_DIM = 8
REFERENCE_PARAMETER_COUNT = 7_450_000


class LayerKind(StrEnum):
    PSTOP = "pstop"
    PSTTRANSOP = "psttransop"


class PSTLayerConfig(BaseModel):
    model_config = {"frozen": True}

    name: str
    kind: LayerKind
    r_s: float | None = Field(default=None, description="Ball query radius in meters")
    s_s: int | None = Field(default=None, description="Spatial subsampling divisor")
    c_s: int = Field(ge=1, description="Output channels of the spatial MLP")
    r_t: int = Field(ge=0, description="Temporal window radius in frames")
    s_t: int = Field(ge=1, description="Temporal stride")
    c_t: int = Field(ge=1, description="Output channels of the temporal MLP")
    p_t: tuple[int, int] = Field(default=(0, 0), description="(begin, end) temporal padding")
    k: int = Field(default=NEIGHBORS, ge=1, description="Maximum ball query neighbours")

    @model_validator(mode="after")
    def _spatial_fields_match_kind(self) -> PSTLayerConfig:
        if self.kind is LayerKind.PSTOP:
            if self.r_s is None or self.r_s <= 0 or self.s_s is None or self.s_s < 1:
                msg = f"{self.name}: a PSTOp layer needs r_s > 0 and s_s >= 1"
                raise ValueError(msg)
        elif self.r_s is not None or self.s_s is not None:
            msg = f"{self.name}: a PSTTransOp layer has no spatial radius or stride"
            raise ValueError(msg)
        return self

    def scaled(self, channel_scale: float) -> PSTLayerConfig:
        """Copy with hidden widths multiplied by ``channel_scale`` (at least 1 channel)."""
        if channel_scale == 1.0:
            return self

        def width(c: int) -> int:
            return max(1, round(c * channel_scale))

        return self.model_copy(
            update={
                "c_s": width(self.c_s),
                "c_t": width(self.c_t),
            }
        )


def _encoder(
    name: str, multiple: float, s_s: int, c_s: int, s_t: int, c_t: int, pad: int
) -> PSTLayerConfig:
    return PSTLayerConfig(
        name=name,
        kind=LayerKind.PSTOP,
        r_s=multiple * R0,
        s_s=s_s,
        c_s=c_s,
        r_t=1,
        s_t=s_t,
        c_t=c_t,
        p_t=(pad, pad),
    )


def _decoder(name: str, c_s: int, s_t: int, c_t: int, pad: int) -> PSTLayerConfig:
    return PSTLayerConfig(
        name=name, kind=LayerKind.PSTTRANSOP, c_s=c_s, r_t=1, s_t=s_t, c_t=c_t, p_t=(pad, pad)
    )


EXTRACTOR = PSTLayerConfig(
    name="extractor",
    kind=LayerKind.PSTOP,
    r_s=R0,
    s_s=2,
    c_s=4,
    r_t=0,
    s_t=1,
    c_t=DEFAULT_DESCRIPTOR_DIM,
)

ENCODER2 = _encoder("encoder2", 2, s_s=2, c_s=45, s_t=2, c_t=64, pad=0)
ENCODER3 = _encoder("encoder3", 2, s_s=1, c_s=128, s_t=1, c_t=256, pad=1)
ENCODER4 = _encoder("encoder4", 4, s_s=2, c_s=384, s_t=2, c_t=512, pad=0)
ENCODER5 = _encoder("encoder5", 8, s_s=2, c_s=768, s_t=1, c_t=1024, pad=1)

DECODER5 = _decoder("decoder5", c_s=512, s_t=1, c_t=768, pad=-1)
DECODER4 = _decoder("decoder4", c_s=256, s_t=2, c_t=384, pad=0)
DECODER3 = _decoder("decoder3", c_s=64, s_t=1, c_t=128, pad=-1)
DECODER2 = _decoder("decoder2", c_s=DEFAULT_DESCRIPTOR_DIM, s_t=2, c_t=45, pad=0)

ENCODERS: tuple[PSTLayerConfig, ...] = (ENCODER2, ENCODER3, ENCODER4, ENCODER5)
DECODERS: tuple[PSTLayerConfig, ...] = (DECODER5, DECODER4, DECODER3, DECODER2)

PRESETS: dict[str, PSTLayerConfig] = {
    layer.name: layer for layer in (EXTRACTOR, *ENCODERS, *DECODERS)
}


class ModelConfig(BaseModel):
    descriptor_dim: int = Field(
        default=DEFAULT_DESCRIPTOR_DIM, description="Local descriptor width f of the extractor"
    )
    r0: float = Field(default=R0, gt=0, description="Initial ball query radius in meters")
    neighbors: int = Field(default=NEIGHBORS, ge=1, description="Ball query K")
    num_points: int = Field(default=2048, ge=1, description="Points per frame after resampling")
    clip_length: int = Field(default=15, ge=1, description="Frames per clip")
    channel_scale: float = Field(
        default=1.0,
        gt=0,
        description="Multiplier for every hidden width; the terminal width stays f",
    )
    fps_seed: FpsSeed = Field(default=FpsSeed.FIRST, description="FPS seed point selection")
    dtype: Literal["float64", "float32"] = Field(
        default="float64", description="Floating point type of weights and activations"
    )
    layers: dict[str, PSTLayerConfig] = Field(
        default_factory=dict,
        description="Per-layer overrides keyed by preset name (extractor, encoder2, ...)",
    )

    @model_validator(mode="after")
    def _valid_descriptor_dim(self) -> ModelConfig:
        if self.descriptor_dim not in DESCRIPTOR_DIMS:
            msg = f"descriptor_dim must be one of {DESCRIPTOR_DIMS}, got {self.descriptor_dim}"
            raise ValueError(msg)
        unknown = sorted(set(self.layers) - set(PRESETS))
        if unknown:
            msg = f"Unknown layer overrides: {unknown}"
            raise ValueError(msg)
        return self

    def _resolve(self, preset: PSTLayerConfig) -> PSTLayerConfig:
        layer = self.layers.get(preset.name, preset)
        update: dict[str, object] = {"k": self.neighbors}
        if layer.r_s is not None and preset.name not in self.layers:
            update["r_s"] = layer.r_s / R0 * self.r0
        return layer.model_copy(update=update)

    def extractor_layer(self) -> PSTLayerConfig:
        layer = self._resolve(EXTRACTOR)
        return layer.model_copy(update={"c_t": self.descriptor_dim})

    def encoder_layers(self) -> list[PSTLayerConfig]:
        return [self._resolve(p).scaled(self.channel_scale) for p in ENCODERS]

    def decoder_layers(self) -> list[PSTLayerConfig]:
        layers = [self._resolve(p).scaled(self.channel_scale) for p in DECODERS]
        layers[-1] = layers[-1].model_copy(update={"c_s": self.descriptor_dim})
        return layers

    @property
    def numpy_dtype(self) -> type:
        return np.float64 if self.dtype == "float64" else np.float32


def check_descriptor_dim(f: int) -> None:
    if f not in DESCRIPTOR_DIMS:
        msg = f"descriptor dimension f must be one of {DESCRIPTOR_DIMS}, got {f}"
        raise ConfigurationError(msg)
