"""Deterministic synthetic point-cloud videos of a room with scripted actors.

The background (floor, two walls, clutter boxes) is sampled once per video as small surfels
snapped to voxel centres, so it is identical in every frame before noise. Actors walk by
default and switch to a scripted behaviour on the script's frames. Labels are 1 exactly on
frames where some anomalous script is active.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from pcv_data.models import Clip, PointFrame
from pcv_data.synthetic.humanoid import Humanoid, Pose, object_cluster
from pcv_data.synthetic.scene import (
    ACTION_CLASSES,
    BehaviorKind,
    BehaviorScript,
    SceneConfig,
    validate_scripts,
)
from pstae_core.errors import ConfigurationError

logger = logging.getLogger(__name__)

WALL_MARGIN = 0.9
COLLAPSE_FRAMES = 15
PARTNER_DISTANCE = 0.8


@dataclass(frozen=True)
class Gait:
    speed: float
    leg_amplitude: float
    arm_amplitude: float
    frequency: float
    height_scale: float = 1.0


WALK_GAIT = Gait(speed=1.2, leg_amplitude=0.35, arm_amplitude=0.3, frequency=1.8)
GAITS: dict[BehaviorKind, Gait] = {
    BehaviorKind.WALK: WALK_GAIT,
    BehaviorKind.LEAVE_OBJECT: WALK_GAIT,
    BehaviorKind.RUN: Gait(
        speed=3 * WALK_GAIT.speed, leg_amplitude=0.85, arm_amplitude=0.7, frequency=3.0
    ),
    BehaviorKind.CRAWL: Gait(
        speed=0.3, leg_amplitude=0.3, arm_amplitude=0.3, frequency=1.2, height_scale=0.5
    ),
}


@dataclass
class _Actor:
    body: Humanoid
    x: float
    y: float
    heading: float
    phase: float = 0.0
    scripts: list[BehaviorScript] = field(default_factory=list)

    def script_at(self, frame: int) -> BehaviorScript | None:
        return next((s for s in self.scripts if s.active(frame)), None)


def _snap(points: np.ndarray, voxel: float) -> np.ndarray:
    return (np.floor(points / voxel) + 0.5) * voxel


def _surfels(samples: np.ndarray, cfg: SceneConfig, rng: np.random.Generator) -> np.ndarray:
    centres = np.repeat(_snap(samples, cfg.surfel_voxel), cfg.surfel_points, axis=0)
    jitter = rng.uniform(-0.005, 0.005, size=centres.shape)
    return centres + jitter


def _grid(a_max: float, b_max: float, spacing: float) -> tuple[np.ndarray, np.ndarray]:
    a = np.arange(spacing / 2, a_max, spacing)
    b = np.arange(spacing / 2, b_max, spacing)
    aa, bb = np.meshgrid(a, b, indexing="ij")
    return aa.reshape(-1), bb.reshape(-1)


def build_background(cfg: SceneConfig, rng: np.random.Generator) -> np.ndarray:
    width, depth, height = cfg.room_size
    s = cfg.surface_spacing
    samples = []
    x, y = _grid(width, depth, s)
    samples.append(np.stack([x, y, np.zeros_like(x)], axis=1))
    x, z = _grid(width, height, s)
    samples.append(np.stack([x, np.full_like(x, depth), z], axis=1))
    y, z = _grid(depth, height, s)
    samples.append(np.stack([np.zeros_like(y), y, z], axis=1))

    lo, hi = cfg.clutter_size
    for _ in range(cfg.clutter_boxes):
        size = rng.uniform(lo, hi)
        cx = rng.uniform(size, width - size)
        cy = rng.uniform(size, depth - size)
        a, b = _grid(size, size, s / 2)
        top = np.stack([cx - size / 2 + a, cy - size / 2 + b, np.full_like(a, size)], axis=1)
        front = np.stack([cx - size / 2 + a, np.full_like(a, cy - size / 2), b], axis=1)
        side = np.stack([np.full_like(a, cx + size / 2), cy - size / 2 + a, b], axis=1)
        samples.extend([top, front, side])
    return _surfels(np.concatenate(samples), cfg, rng)


def _reflect(actor: _Actor, cfg: SceneConfig) -> None:
    width, depth, _ = cfg.room_size
    lo_x, hi_x = WALL_MARGIN, max(WALL_MARGIN, width - WALL_MARGIN)
    lo_y, hi_y = WALL_MARGIN, max(WALL_MARGIN, depth - WALL_MARGIN)
    if actor.x < lo_x or actor.x > hi_x:
        actor.x = float(np.clip(2 * (lo_x if actor.x < lo_x else hi_x) - actor.x, lo_x, hi_x))
        actor.heading = np.pi - actor.heading
    if actor.y < lo_y or actor.y > hi_y:
        actor.y = float(np.clip(2 * (lo_y if actor.y < lo_y else hi_y) - actor.y, lo_y, hi_y))
        actor.heading = -actor.heading


def _clamp_to_room(x: float, y: float, cfg: SceneConfig) -> tuple[float, float]:
    width, depth, _ = cfg.room_size
    return (
        float(np.clip(x, WALL_MARGIN, max(WALL_MARGIN, width - WALL_MARGIN))),
        float(np.clip(y, WALL_MARGIN, max(WALL_MARGIN, depth - WALL_MARGIN))),
    )


def _gait_pose(actor: _Actor, gait: Gait, cfg: SceneConfig, speed_scale: float = 1.0) -> Pose:
    dt = 1.0 / cfg.frame_rate
    actor.x += np.cos(actor.heading) * gait.speed * speed_scale * dt
    actor.y += np.sin(actor.heading) * gait.speed * speed_scale * dt
    _reflect(actor, cfg)
    actor.phase += 2 * np.pi * gait.frequency * dt
    swing = np.sin(actor.phase)
    return Pose(
        x=actor.x,
        y=actor.y,
        heading=actor.heading,
        leg_swing=gait.leg_amplitude * swing,
        arm_swing=gait.arm_amplitude * swing,
        height_scale=gait.height_scale,
    )


def _argue_raise(phase: float) -> float:
    return 0.9 + 0.7 * np.sin(phase)


def _actor_points(
    actor: _Actor,
    frame: int,
    cfg: SceneConfig,
    partners: dict[int, Humanoid],
) -> list[np.ndarray]:
    script = actor.script_at(frame)
    kind = script.kind if script else BehaviorKind.WALK
    dt = 1.0 / cfg.frame_rate

    if kind in GAITS:
        scale = script.speed_scale if script else 1.0
        return [actor.body.points(_gait_pose(actor, GAITS[kind], cfg, scale))]

    assert script is not None
    elapsed = frame - script.start_frame
    if kind is BehaviorKind.COLLAPSE:
        progress = min(1.0, (elapsed + 1) / COLLAPSE_FRAMES)
        pose = Pose(
            x=actor.x,
            y=actor.y,
            heading=actor.heading,
            height_scale=1.0 - 0.85 * progress,
            spread=1.0 + 0.6 * progress,
        )
        return [actor.body.points(pose)]

    actor.phase += 2 * np.pi * 2.5 * dt
    if kind is BehaviorKind.WAVE:
        pose = Pose(
            x=actor.x,
            y=actor.y,
            heading=actor.heading,
            right_arm_raise=2.6 + 0.4 * np.sin(actor.phase),
        )
        return [actor.body.points(pose)]

    # argue: two actors face each other and gesticulate
    raise_own = _argue_raise(actor.phase)
    own = Pose(
        x=actor.x,
        y=actor.y,
        heading=actor.heading,
        left_arm_raise=raise_own,
        right_arm_raise=_argue_raise(actor.phase + 1.3),
    )
    px, py = _clamp_to_room(
        actor.x + PARTNER_DISTANCE * np.cos(actor.heading),
        actor.y + PARTNER_DISTANCE * np.sin(actor.heading),
        cfg,
    )
    other = Pose(
        x=px,
        y=py,
        heading=actor.heading + np.pi,
        left_arm_raise=_argue_raise(actor.phase + 2.1),
        right_arm_raise=_argue_raise(actor.phase + 0.4),
    )
    return [actor.body.points(own), partners[id(script)].points(other)]


def frame_labels(scripts: list[BehaviorScript], num_frames: int) -> np.ndarray:
    labels = np.zeros(num_frames, dtype=np.int64)
    for script in scripts:
        if script.is_anomalous:
            labels[script.start_frame : script.end_frame + 1] = 1
    return labels


def gen_video(
    cfg: SceneConfig, scripts: list[BehaviorScript]
) -> tuple[list[PointFrame], np.ndarray]:
    """Render ``cfg.num_frames`` frames; returns the frames and per-frame 0/1 labels."""
    validate_scripts(cfg, scripts)
    rng = np.random.default_rng(cfg.seed)
    background = build_background(cfg, rng)

    width, depth, _ = cfg.room_size
    actors = []
    for actor_id in range(cfg.num_actors):
        x, y = _clamp_to_room(rng.uniform(0, width), rng.uniform(0, depth), cfg)
        actors.append(
            _Actor(
                body=Humanoid(rng),
                x=x,
                y=y,
                heading=float(rng.uniform(0, 2 * np.pi)),
                phase=float(rng.uniform(0, 2 * np.pi)),
                scripts=[s for s in scripts if s.actor_id == actor_id],
            )
        )
    partners = {id(s): Humanoid(rng) for s in scripts if s.kind is BehaviorKind.ARGUE}
    objects: dict[int, np.ndarray] = {}
    object_rng = {
        id(s): np.random.default_rng([cfg.seed, i])
        for i, s in enumerate(scripts)
        if s.kind is BehaviorKind.LEAVE_OBJECT
    }

    frames = []
    for t in range(cfg.num_frames):
        parts = [background]
        for actor in actors:
            script = actor.script_at(t)
            drops = script is not None and script.kind is BehaviorKind.LEAVE_OBJECT
            if drops and t == script.start_frame:
                # dropped half a meter behind the actor, who then walks on
                ox, oy = _clamp_to_room(
                    actor.x - 0.5 * np.cos(actor.heading),
                    actor.y - 0.5 * np.sin(actor.heading),
                    cfg,
                )
                objects[id(script)] = object_cluster(object_rng[id(script)], ox, oy)
            parts.extend(_actor_points(actor, t, cfg, partners))
        parts.extend(objects.values())
        points = np.concatenate(parts)
        if cfg.noise_sigma > 0:
            points = points + rng.normal(0.0, cfg.noise_sigma, size=points.shape)
        frames.append(PointFrame(points=points))

    labels = frame_labels(scripts, cfg.num_frames)
    logger.debug(
        "Generated %d frames (%d anomalous) with seed %d", cfg.num_frames, labels.sum(), cfg.seed
    )
    return frames, labels


# =============================================================================
# Action clips for extractor pretraining
# =============================================================================


@dataclass(frozen=True)
class ActionClip:
    clip: Clip
    label: int
    action: BehaviorKind


def _action_frames(
    cfg: SceneConfig, kind: BehaviorKind, length: int, rng: np.random.Generator
) -> list[PointFrame]:
    width, depth, _ = cfg.room_size
    x, y = _clamp_to_room(rng.uniform(0, width), rng.uniform(0, depth), cfg)
    script = BehaviorScript(kind=kind, start_frame=0, end_frame=length - 1)
    actor = _Actor(
        body=Humanoid(rng),
        x=x,
        y=y,
        heading=float(rng.uniform(0, 2 * np.pi)),
        phase=float(rng.uniform(0, 2 * np.pi)),
        scripts=[script],
    )
    frames = []
    for t in range(length):
        points = np.concatenate(_actor_points(actor, t, cfg, {}))
        if cfg.noise_sigma > 0:
            points = points + rng.normal(0.0, cfg.noise_sigma, size=points.shape)
        frames.append(PointFrame(points=points))
    return frames


def gen_action_dataset(
    cfg: SceneConfig,
    classes: tuple[BehaviorKind, ...] = ACTION_CLASSES,
    per_class: int = 10,
    *,
    clip_length: int = 15,
) -> list[ActionClip]:
    """Foreground-only labelled clips, ``per_class`` per class, ordered by class then index."""
    if per_class < 1:
        raise ConfigurationError(f"per_class must be >= 1, got {per_class}")
    unsupported = [c for c in classes if c not in (*GAITS, BehaviorKind.WAVE)]
    if unsupported:
        raise ConfigurationError(f"action classes must move on their own, got {unsupported}")
    clips = []
    for label, kind in enumerate(classes):
        for i in range(per_class):
            rng = np.random.default_rng([cfg.seed, label, i])
            frames = _action_frames(cfg, kind, clip_length, rng)
            clip = Clip(
                frames=tuple(frames), source_video_id=f"{kind}-{i:03d}", start_frame_index=0
            )
            clips.append(ActionClip(clip=clip, label=label, action=kind))
    return clips


# =============================================================================
# Test-set scripting helpers
# =============================================================================


def anomaly_scripts(
    cfg: SceneConfig, kind: BehaviorKind, rng: np.random.Generator, actor_id: int = 0
) -> list[BehaviorScript]:
    """Walk, then ``kind``, then walk again; collapse and left objects last to the end."""
    if kind not in GAITS and kind not in (BehaviorKind.COLLAPSE, BehaviorKind.ARGUE):
        raise ConfigurationError(f"{kind} is not a scriptable anomaly")
    total = cfg.num_frames
    start = int(rng.integers(total // 3, total // 2 + 1))
    if kind in (BehaviorKind.COLLAPSE, BehaviorKind.LEAVE_OBJECT):
        end = total - 1
    else:
        end = min(total - 1, start + int(rng.integers(20, 31)))
    return [BehaviorScript(kind=kind, start_frame=start, end_frame=end, actor_id=actor_id)]
