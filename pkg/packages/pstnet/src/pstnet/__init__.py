"""Point spatio-temporal networks: point-tube kernels, PSTOp/PSTTransOp layers, PSTAE."""

from pstnet.config import (
    DECODERS,
    DESCRIPTOR_DIMS,
    ENCODERS,
    EXTRACTOR,
    PRESETS,
    LayerKind,
    ModelConfig,
    PSTLayerConfig,
)
from pstnet.layers import FeaturedClip, PSTOp, PSTTransOp
from pstnet.network import (
    PSTAE,
    ActionHead,
    ActionNet,
    ArchitectureReport,
    Extractor,
    architecture,
    build_extractor,
    build_pstae,
)
from pstnet.sampling import FpsSeed, NeighborTable, ball_query, fps, three_nn_weights
from pstnet.temporal import TemporalPlan, temporal_plan, transposed_temporal_plan

__all__ = [
    "DECODERS",
    "DESCRIPTOR_DIMS",
    "ENCODERS",
    "EXTRACTOR",
    "PRESETS",
    "PSTAE",
    "ActionHead",
    "ActionNet",
    "ArchitectureReport",
    "Extractor",
    "FeaturedClip",
    "FpsSeed",
    "LayerKind",
    "ModelConfig",
    "NeighborTable",
    "PSTLayerConfig",
    "PSTOp",
    "PSTTransOp",
    "TemporalPlan",
    "architecture",
    "ball_query",
    "build_extractor",
    "build_pstae",
    "fps",
    "temporal_plan",
    "three_nn_weights",
    "transposed_temporal_plan",
]
