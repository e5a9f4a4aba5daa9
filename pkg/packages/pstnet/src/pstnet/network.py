"""Network assembly: shallow extractor, PSTAE encoder/decoder stack, action head."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, Field

from pstae_core.errors import ConfigurationError
from pstae_core.nn import Linear, Module
from pstae_core.tensor import concat
from pstnet.config import (
    REFERENCE_PARAMETER_COUNT,
    LayerKind,
    ModelConfig,
    PSTLayerConfig,
    check_descriptor_dim,
)
from pstnet.layers import FeaturedClip, PSTOp, PSTTransOp
from pstnet.sampling import FpsSeed
from pstnet.temporal import temporal_plan, transposed_temporal_plan

if TYPE_CHECKING:
    from collections.abc import Sequence

    from pstae_core.tensor import DTensor

logger = logging.getLogger(__name__)

PARAMETER_TOLERANCE = 0.5


class Extractor(Module):
    """Single PSTOp without temporal aggregation: per-anchor local descriptors of width f."""

    def __init__(
        self,
        config: PSTLayerConfig,
        *,
        rng: np.random.Generator,
        dtype: type = np.float64,
        fps_seed: FpsSeed = FpsSeed.FIRST,
    ) -> None:
        if config.r_t != 0 or config.s_t != 1:
            msg = f"extractor must not aggregate over time (r_t={config.r_t}, s_t={config.s_t})"
            raise ConfigurationError(msg)
        self.layer = PSTOp(config, 0, rng=rng, dtype=dtype, fps_seed=fps_seed)

    @property
    def descriptor_dim(self) -> int:
        return self.layer.config.c_t

    def forward(self, points: np.ndarray) -> FeaturedClip:
        """``points`` is a (T, M, 3) clip; returns (T, M // s_s) anchors with f features."""
        return self.layer(FeaturedClip(coords=np.asarray(points, dtype=np.float64)))


class PSTAE(Module):
    """Encoder stack followed by a decoder stack with coordinate-only skip connections.

    Decoder ``i`` (counted from the bottom) receives the input coordinates of encoder
    ``n - 1 - i``, so the output lands on the coordinates of the first encoder's input.
    """

    def __init__(
        self,
        encoders: Sequence[PSTLayerConfig],
        decoders: Sequence[PSTLayerConfig],
        in_channels: int,
        *,
        rng: np.random.Generator,
        dtype: type = np.float64,
        fps_seed: FpsSeed = FpsSeed.FIRST,
    ) -> None:
        if len(encoders) != len(decoders) or not encoders:
            msg = f"need matching encoder/decoder stacks, got {len(encoders)}/{len(decoders)}"
            raise ConfigurationError(msg)
        if decoders[-1].c_s != in_channels:
            msg = f"terminal decoder width {decoders[-1].c_s} must equal input width {in_channels}"
            raise ConfigurationError(msg)

        self.encoders: list[PSTOp] = []
        channels = in_channels
        for cfg in encoders:
            self.encoders.append(PSTOp(cfg, channels, rng=rng, dtype=dtype, fps_seed=fps_seed))
            channels = cfg.c_t
        self.decoders: list[PSTTransOp] = []
        for i, cfg in enumerate(decoders):
            final = i == len(decoders) - 1
            self.decoders.append(PSTTransOp(cfg, channels, rng=rng, dtype=dtype, final=final))
            channels = cfg.c_s

    def forward(self, clip: FeaturedClip) -> FeaturedClip:
        skips = []
        x = clip
        for encoder in self.encoders:
            skips.append(x.coords)
            x = encoder(x)
        for decoder, skip in zip(self.decoders, reversed(skips), strict=True):
            x = decoder(x, skip)
        return x


class ActionHead(Module):
    """Global max over every anchor of every frame, then a two-layer MLP to class logits."""

    def __init__(
        self,
        in_channels: int,
        num_classes: int,
        *,
        hidden_channels: int = 64,
        rng: np.random.Generator,
        dtype: type = np.float64,
    ) -> None:
        if num_classes < 1:
            raise ConfigurationError("action head needs at least one class")
        self.num_classes = num_classes
        self.hidden = Linear(in_channels, hidden_channels, rng=rng, dtype=dtype)
        self.logits = Linear(hidden_channels, num_classes, rng=rng, activation=False, dtype=dtype)

    def forward(self, clip: FeaturedClip) -> DTensor:
        if clip.features is None:
            raise ConfigurationError("action head needs a featured clip")
        pooled = concat(list(clip.features), axis=0).max(axis=0)
        return self.logits(self.hidden(pooled))


class ActionNet(Module):
    """Extractor plus action head; only used to pretrain the extractor."""

    def __init__(self, extractor: Extractor, head: ActionHead) -> None:
        self.extractor = extractor
        self.head = head

    def forward(self, points: np.ndarray) -> DTensor:
        return self.head(self.extractor(points))


def _rng(seed: int | np.random.Generator) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def build_extractor(
    f: int, config: ModelConfig | None = None, *, seed: int | np.random.Generator = 0
) -> Extractor:
    check_descriptor_dim(f)
    cfg = (config or ModelConfig()).model_copy(update={"descriptor_dim": f})
    return Extractor(
        cfg.extractor_layer(), rng=_rng(seed), dtype=cfg.numpy_dtype, fps_seed=cfg.fps_seed
    )


def build_pstae(
    f: int, config: ModelConfig | None = None, *, seed: int | np.random.Generator = 0
) -> PSTAE:
    check_descriptor_dim(f)
    cfg = (config or ModelConfig()).model_copy(update={"descriptor_dim": f})
    model = PSTAE(
        cfg.encoder_layers(),
        cfg.decoder_layers(),
        f,
        rng=_rng(seed),
        dtype=cfg.numpy_dtype,
        fps_seed=cfg.fps_seed,
    )
    logger.info("Built PSTAE f=%d with %d parameters", f, model.parameter_count())
    return model


# =============================================================================
# Architecture dump
# =============================================================================


class LayerSummary(BaseModel):
    name: str
    kind: LayerKind
    config: PSTLayerConfig
    input_shape: tuple[int, int, int] = Field(description="(frames, points, channels) in")
    output_shape: tuple[int, int, int] = Field(description="(frames, points, channels) out")
    parameters: int


class ArchitectureReport(BaseModel):
    descriptor_dim: int
    num_points: int
    clip_length: int
    layers: list[LayerSummary]
    extractor_parameters: int
    pstae_parameters: int
    reference_parameters: int = REFERENCE_PARAMETER_COUNT
    relative_deviation: float
    within_tolerance: bool


def _linear_params(fan_in: int, fan_out: int) -> int:
    return fan_in * fan_out + fan_out


def _pstop_params(cfg: PSTLayerConfig, in_channels: int) -> int:
    window = 2 * cfg.r_t + 1
    return _linear_params(3 + in_channels, cfg.c_s) + _linear_params(window * cfg.c_s, cfg.c_t)


def _psttransop_params(cfg: PSTLayerConfig, in_channels: int) -> int:
    window = 2 * cfg.r_t + 1
    # Bias-free temporal weights plus one seed bias of width c_t.
    temporal = in_channels * window * cfg.c_t + cfg.c_t
    return temporal + _linear_params(cfg.c_t, cfg.c_s)


def architecture(config: ModelConfig) -> ArchitectureReport:
    """Per-layer shapes and parameter counts, derived from the plans without running a clip."""
    f = config.descriptor_dim
    layers: list[LayerSummary] = []

    ext = config.extractor_layer()
    frames, points = config.clip_length, config.num_points
    assert ext.s_s is not None
    shape_in = (frames, points, 0)
    points = max(1, points // ext.s_s)
    shape = (temporal_plan(frames, ext.r_t, ext.s_t, *ext.p_t).output_length, points, ext.c_t)
    layers.append(
        LayerSummary(
            name=ext.name,
            kind=ext.kind,
            config=ext,
            input_shape=shape_in,
            output_shape=shape,
            parameters=_pstop_params(ext, 0),
        )
    )

    skips = []
    for cfg in config.encoder_layers():
        assert cfg.s_s is not None
        skips.append(shape)
        t = temporal_plan(shape[0], cfg.r_t, cfg.s_t, *cfg.p_t).output_length
        out = (t, max(1, shape[1] // cfg.s_s), cfg.c_t)
        layers.append(
            LayerSummary(
                name=cfg.name,
                kind=cfg.kind,
                config=cfg,
                input_shape=shape,
                output_shape=out,
                parameters=_pstop_params(cfg, shape[2]),
            )
        )
        shape = out
    for cfg, skip in zip(config.decoder_layers(), reversed(skips), strict=True):
        t = transposed_temporal_plan(shape[0], cfg.r_t, cfg.s_t, *cfg.p_t).output_length
        out = (t, skip[1], cfg.c_s)
        layers.append(
            LayerSummary(
                name=cfg.name,
                kind=cfg.kind,
                config=cfg,
                input_shape=shape,
                output_shape=out,
                parameters=_psttransop_params(cfg, shape[2]),
            )
        )
        shape = out

    extractor_params = layers[0].parameters
    pstae_params = sum(layer.parameters for layer in layers[1:])
    deviation = (pstae_params - REFERENCE_PARAMETER_COUNT) / REFERENCE_PARAMETER_COUNT
    within = abs(deviation) <= PARAMETER_TOLERANCE
    if not within:
        logger.warning(
            "PSTAE parameter count %d deviates %.1f%% from the %d reference",
            pstae_params,
            100 * deviation,
            REFERENCE_PARAMETER_COUNT,
        )
    else:
        logger.info(
            "PSTAE parameter count %d (%.1f%% from reference)", pstae_params, 100 * deviation
        )
    return ArchitectureReport(
        descriptor_dim=f,
        num_points=config.num_points,
        clip_length=config.clip_length,
        layers=layers,
        extractor_parameters=extractor_params,
        pstae_parameters=pstae_params,
        relative_deviation=deviation,
        within_tolerance=within,
    )
