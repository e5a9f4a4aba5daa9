"""Seeded synthetic point-cloud videos standing in for a recorded indoor dataset."""

from pcv_data.synthetic.dataset import DatasetSpec, generate_dataset, plan_jobs
from pcv_data.synthetic.generator import (
    ActionClip,
    anomaly_scripts,
    gen_action_dataset,
    gen_video,
)
from pcv_data.synthetic.scene import (
    ACTION_CLASSES,
    ANOMALOUS_KINDS,
    CATEGORY_OF,
    AnomalyCategory,
    BehaviorKind,
    BehaviorScript,
    ContradictoryScriptError,
    SceneConfig,
)

__all__ = [
    "ACTION_CLASSES",
    "ANOMALOUS_KINDS",
    "CATEGORY_OF",
    "ActionClip",
    "AnomalyCategory",
    "BehaviorKind",
    "BehaviorScript",
    "ContradictoryScriptError",
    "DatasetSpec",
    "SceneConfig",
    "anomaly_scripts",
    "gen_action_dataset",
    "gen_video",
    "generate_dataset",
    "plan_jobs",
]
