"""Scene and behaviour configuration for synthetic point-cloud videos."""

from __future__ import annotations

from enum import StrEnum

from pydantic import BaseModel, Field, model_validator

from pstae_core.errors import ConfigurationError


class BehaviorKind(StrEnum):
    WALK = "walk"
    RUN = "run"
    COLLAPSE = "collapse"
    CRAWL = "crawl"
    LEAVE_OBJECT = "leave-object"
    ARGUE = "argue"
    WAVE = "wave"


ANOMALOUS_KINDS = frozenset(
    {
        BehaviorKind.RUN,
        BehaviorKind.COLLAPSE,
        BehaviorKind.CRAWL,
        BehaviorKind.LEAVE_OBJECT,
        BehaviorKind.ARGUE,
    }
)

ACTION_CLASSES: tuple[BehaviorKind, ...] = (
    BehaviorKind.WALK,
    BehaviorKind.RUN,
    BehaviorKind.CRAWL,
    BehaviorKind.WAVE,
)


class AnomalyCategory(StrEnum):
    AGGRESSIVE_BEHAVIOR = "aggressive-behavior"
    MEDICAL_ISSUE = "medical-issue"
    LEFT_BEHIND_OBJECT = "left-behind-object"


CATEGORY_OF: dict[BehaviorKind, AnomalyCategory] = {
    BehaviorKind.RUN: AnomalyCategory.AGGRESSIVE_BEHAVIOR,
    BehaviorKind.ARGUE: AnomalyCategory.AGGRESSIVE_BEHAVIOR,
    BehaviorKind.COLLAPSE: AnomalyCategory.MEDICAL_ISSUE,
    BehaviorKind.CRAWL: AnomalyCategory.MEDICAL_ISSUE,
    BehaviorKind.LEAVE_OBJECT: AnomalyCategory.LEFT_BEHIND_OBJECT,
}


class ContradictoryScriptError(ConfigurationError):
    def __init__(self, actor_id: int, first: BehaviorScript, second: BehaviorScript) -> None:
        self.actor_id = actor_id
        super().__init__(
            f"actor {actor_id}: '{first.kind}' on frames {first.start_frame}-{first.end_frame} "
            f"overlaps '{second.kind}' on frames {second.start_frame}-{second.end_frame}"
        )


class SceneConfig(BaseModel):
    room_size: tuple[float, float, float] = Field(
        default=(4.0, 3.0, 2.5), description="Room extent (x, y, z) in meters; z is up"
    )
    clutter_boxes: int = Field(default=2, ge=0, description="Static boxes standing on the floor")
    clutter_size: tuple[float, float] = Field(
        default=(0.3, 0.7), description="Min/max box edge length in meters"
    )
    num_actors: int = Field(default=1, ge=1, description="Actors walking by default")
    num_frames: int = Field(default=90, ge=1, description="Frames per video")
    frame_rate: float = Field(default=10.0, gt=0, description="Frames per second")
    noise_sigma: float = Field(default=0.005, ge=0, description="Per-frame coordinate noise (m)")
    surface_spacing: float = Field(
        default=0.25, gt=0, description="Spacing of background surface samples in meters"
    )
    surfel_voxel: float = Field(
        default=0.05, gt=0, description="Background samples snap to centres of this voxel grid"
    )
    surfel_points: int = Field(default=5, ge=1, description="Points per background surface sample")
    seed: int = Field(default=0, description="Seed for every random choice of the scene")

    @model_validator(mode="after")
    def _positive_room(self) -> SceneConfig:
        if min(self.room_size) <= 0:
            msg = f"room_size must be positive, got {self.room_size}"
            raise ValueError(msg)
        lo, hi = self.clutter_size
        if not 0 < lo <= hi:
            msg = f"clutter_size must satisfy 0 < min <= max, got {self.clutter_size}"
            raise ValueError(msg)
        return self


class BehaviorScript(BaseModel):
    kind: BehaviorKind
    start_frame: int = Field(ge=0)
    end_frame: int = Field(ge=0, description="Last frame (inclusive) of the behaviour")
    actor_id: int = Field(default=0, ge=0)
    speed_scale: float = Field(default=1.0, gt=0, description="Multiplier on the gait speed")

    @model_validator(mode="after")
    def _ordered(self) -> BehaviorScript:
        if self.end_frame < self.start_frame:
            msg = f"end_frame {self.end_frame} precedes start_frame {self.start_frame}"
            raise ValueError(msg)
        return self

    @property
    def is_anomalous(self) -> bool:
        return self.kind in ANOMALOUS_KINDS

    def active(self, frame: int) -> bool:
        return self.start_frame <= frame <= self.end_frame


def validate_scripts(cfg: SceneConfig, scripts: list[BehaviorScript]) -> None:
    for script in scripts:
        if script.end_frame >= cfg.num_frames:
            msg = (
                f"'{script.kind}' ends at frame {script.end_frame} "
                f"of a {cfg.num_frames}-frame video"
            )
            raise ConfigurationError(msg)
        if script.actor_id >= cfg.num_actors:
            msg = f"script for actor {script.actor_id} but only {cfg.num_actors} actors"
            raise ConfigurationError(msg)
    for actor in range(cfg.num_actors):
        own = sorted((s for s in scripts if s.actor_id == actor), key=lambda s: s.start_frame)
        for first, second in zip(own, own[1:], strict=False):
            if second.start_frame <= first.end_frame:
                raise ContradictoryScriptError(actor, first, second)
