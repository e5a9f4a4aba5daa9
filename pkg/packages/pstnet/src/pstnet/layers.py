"""Point spatio-temporal convolution (PSTOp) and its transposed counterpart (PSTTransOp).

A ``FeaturedClip`` carries, per frame, anchor coordinates and one feature tensor. PSTOp runs
spatial aggregation first (FPS anchors on the window's centre frame, ball query into every
window frame, shared MLP on ``[dxyz, neighbour features]``, max over neighbours) and then a
temporal MLP over the concatenated window. PSTTransOp runs the temporal expansion first and
then interpolates onto the skip coordinates of its paired encoder stage.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from pstae_core.errors import ConfigurationError
from pstae_core.nn import Linear, Module
from pstae_core.tensor import DTensor, concat, sparse_matmul
from pstnet.config import LayerKind, PSTLayerConfig
from pstnet.sampling import FpsSeed, ball_query, fps, resolve_seed, three_nn_weights
from pstnet.temporal import temporal_plan, transposed_temporal_plan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeaturedClip:
    """``coords`` is (T, A, 3); ``features`` holds T tensors of shape (A, c), or is ``None``."""

    coords: np.ndarray
    features: tuple[DTensor, ...] | None = None

    def __post_init__(self) -> None:
        if self.coords.ndim != 3 or self.coords.shape[-1] != 3:
            msg = f"FeaturedClip coords must be (T, A, 3), got {self.coords.shape}"
            raise ConfigurationError(msg)
        if self.features is not None:
            if len(self.features) != self.coords.shape[0]:
                msg = f"{len(self.features)} feature frames for {self.coords.shape[0]} frames"
                raise ConfigurationError(msg)
            widths = {f.shape for f in self.features}
            if widths != {(self.num_points, self.channels)}:
                raise ConfigurationError(f"inconsistent per-frame feature shapes {sorted(widths)}")

    @property
    def length(self) -> int:
        return self.coords.shape[0]

    @property
    def num_points(self) -> int:
        return self.coords.shape[1]

    @property
    def channels(self) -> int:
        return 0 if self.features is None else self.features[0].shape[-1]

    def feature_array(self) -> np.ndarray:
        """Features stacked to a (T, A, c) array."""
        if self.features is None:
            return np.zeros((*self.coords.shape[:2], 0))
        return np.stack([f.data for f in self.features])

    @classmethod
    def from_arrays(cls, coords: np.ndarray, features: np.ndarray | None = None) -> FeaturedClip:
        feats = None if features is None else tuple(DTensor(f) for f in features)
        return cls(coords=np.asarray(coords, dtype=np.float64), features=feats)


class PSTOp(Module):
    def __init__(
        self,
        config: PSTLayerConfig,
        in_channels: int,
        *,
        rng: np.random.Generator,
        dtype: type = np.float64,
        fps_seed: FpsSeed = FpsSeed.FIRST,
    ) -> None:
        if config.kind is not LayerKind.PSTOP:
            raise ConfigurationError(f"{config.name} is not a PSTOp layer")
        self.config = config
        self.in_channels = in_channels
        self._dtype = dtype
        self._fps_seed = fps_seed
        window = 2 * config.r_t + 1
        self.spatial = Linear(3 + in_channels, config.c_s, rng=rng, dtype=dtype)
        self.temporal = Linear(window * config.c_s, config.c_t, rng=rng, dtype=dtype)

    @property
    def dtype(self) -> type:
        return self._dtype

    def output_points(self, num_points: int) -> int:
        assert self.config.s_s is not None
        return max(1, num_points // self.config.s_s)

    def forward(self, clip: FeaturedClip) -> FeaturedClip:
        cfg = self.config
        assert cfg.r_s is not None
        if clip.channels != self.in_channels:
            msg = f"{cfg.name}: expected {self.in_channels} input channels, got {clip.channels}"
            raise ConfigurationError(msg)
        plan = temporal_plan(clip.length, cfg.r_t, cfg.s_t, *cfg.p_t)
        n_anchors = self.output_points(clip.num_points)

        out_coords = []
        out_features = []
        degenerate = 0
        for k, centre in enumerate(plan.anchor_frames):
            centre_xyz = clip.coords[centre]
            anchor_idx = fps(centre_xyz, n_anchors, resolve_seed(centre_xyz, self._fps_seed))
            anchor_xyz = centre_xyz[anchor_idx]

            pooled = []
            for frame in plan.window(k):
                if frame is None:
                    pooled.append(DTensor(np.zeros((n_anchors, cfg.c_s)), dtype=self._dtype))
                    continue
                table = ball_query(anchor_xyz, clip.coords[frame], cfg.r_s, cfg.k)
                degenerate += table.num_degenerate
                pooled.append(self._aggregate(clip, frame, anchor_xyz, table.neighbor_indices))

            window = pooled[0] if len(pooled) == 1 else concat(pooled, axis=-1)
            out_coords.append(anchor_xyz)
            out_features.append(self.temporal(window))

        if degenerate:
            logger.warning("%s: %d degenerate ball-query anchors", cfg.name, degenerate)
        return FeaturedClip(coords=np.stack(out_coords), features=tuple(out_features))

    def _aggregate(
        self,
        clip: FeaturedClip,
        frame: int,
        anchor_xyz: np.ndarray,
        neighbors: np.ndarray,
    ) -> DTensor:
        displacement = clip.coords[frame][neighbors] - anchor_xyz[:, None, :]
        grouped = DTensor(displacement, dtype=self._dtype)
        if clip.features is not None:
            grouped = concat([grouped, clip.features[frame].gather(neighbors)], axis=-1)
        return self.spatial(grouped).max(axis=1)


class PSTTransOp(Module):
    def __init__(
        self,
        config: PSTLayerConfig,
        in_channels: int,
        *,
        rng: np.random.Generator,
        dtype: type = np.float64,
        final: bool = False,
    ) -> None:
        if config.kind is not LayerKind.PSTTRANSOP:
            raise ConfigurationError(f"{config.name} is not a PSTTransOp layer")
        self.config = config
        self.in_channels = in_channels
        self._dtype = dtype
        window = 2 * config.r_t + 1
        self.temporal = Linear(
            in_channels, window * config.c_t, rng=rng, activation=False, bias=False, dtype=dtype
        )
        # Added once per seed point after coincident seeds are merged.
        self.seed_bias = DTensor(
            np.zeros(config.c_t), requires_grad=True, name="seed_bias", dtype=dtype
        )
        self.spatial = Linear(config.c_t, config.c_s, rng=rng, activation=not final, dtype=dtype)

    def forward(self, clip: FeaturedClip, skip_coords: np.ndarray) -> FeaturedClip:
        cfg = self.config
        if clip.features is None or clip.channels != self.in_channels:
            msg = f"{cfg.name}: expected {self.in_channels} input channels, got {clip.channels}"
            raise ConfigurationError(msg)
        plan = transposed_temporal_plan(clip.length, cfg.r_t, cfg.s_t, *cfg.p_t)
        skip = np.asarray(skip_coords)
        if skip.ndim != 3 or skip.shape[0] != plan.output_length:
            msg = (
                f"{cfg.name}: skip coordinates {skip.shape} do not match "
                f"{plan.output_length} output frames"
            )
            raise ConfigurationError(msg)

        expanded = [self.temporal(f) for f in clip.features]
        width = cfg.c_t
        out_features = []
        for j in range(plan.output_length):
            sources = plan.sources(j)
            coords = np.concatenate([clip.coords[k] for k, _ in sources])
            parts = [expanded[k][:, d * width : (d + 1) * width] for k, d in sources]
            seeds = parts[0] if len(parts) == 1 else concat(parts, axis=0)
            coords, seeds = _merge_coincident(coords, seeds)
            seeds = (seeds + self.seed_bias).relu()
            interpolated = sparse_matmul(three_nn_weights(skip[j], coords), seeds)
            out_features.append(self.spatial(interpolated))
        coords_out = skip.astype(np.float64, copy=False)
        return FeaturedClip(coords=coords_out, features=tuple(out_features))


def _merge_coincident(coords: np.ndarray, features: DTensor) -> tuple[np.ndarray, DTensor]:
    """Sum the features of seed points that share exactly the same coordinates."""
    unique, inverse = np.unique(coords, axis=0, return_inverse=True)
    if unique.shape[0] == coords.shape[0]:
        return coords, features
    inverse = inverse.reshape(-1)
    merge = sparse.csr_array(
        (np.ones(coords.shape[0]), (inverse, np.arange(coords.shape[0]))),
        shape=(unique.shape[0], coords.shape[0]),
    )
    return unique, sparse_matmul(merge, features)

