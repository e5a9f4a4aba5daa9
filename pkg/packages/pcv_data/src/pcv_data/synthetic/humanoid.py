"""Blob humanoid: ellipsoid body parts posed by a handful of joint angles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# (name, points, semi-axes (x, y, z), anchor in body frame, limb group)
# Limbs hang from their anchor joint; torso and head are centred on their anchor.
_PARTS: tuple[tuple[str, int, tuple[float, float, float], tuple[float, float, float], str], ...] = (
    ("torso", 120, (0.12, 0.18, 0.30), (0.0, 0.0, 1.15), "body"),
    ("head", 40, (0.10, 0.09, 0.12), (0.0, 0.0, 1.60), "body"),
    ("left_arm", 30, (0.05, 0.05, 0.32), (0.0, 0.24, 1.42), "left_arm"),
    ("right_arm", 30, (0.05, 0.05, 0.32), (0.0, -0.24, 1.42), "right_arm"),
    ("left_leg", 35, (0.07, 0.07, 0.42), (0.0, 0.10, 0.85), "left_leg"),
    ("right_leg", 35, (0.07, 0.07, 0.42), (0.0, -0.10, 0.85), "right_leg"),
)

POINTS_PER_HUMANOID = sum(p[1] for p in _PARTS)
OBJECT_POINTS = 50


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float = 0.0
    leg_swing: float = 0.0
    arm_swing: float = 0.0
    left_arm_raise: float = 0.0
    right_arm_raise: float = 0.0
    height_scale: float = 1.0
    spread: float = 1.0


def _rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rot_x(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _unit_surface(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class Humanoid:
    """Fixed per-actor surface samples; ``points(pose)`` places them in the world."""

    def __init__(self, rng: np.random.Generator) -> None:
        self._samples = [_unit_surface(rng, n) for _, n, *_ in _PARTS]

    def points(self, pose: Pose) -> np.ndarray:
        parts = []
        for (_, _, axes, anchor, group), unit in zip(_PARTS, self._samples, strict=True):
            local = unit * np.asarray(axes)
            joint = np.asarray(anchor)
            if group == "body":
                parts.append(joint + local)
                continue
            rotation = self._limb_rotation(group, pose)
            offset = np.array([0.0, 0.0, -axes[2]])
            parts.append(joint + (offset + local) @ rotation.T)
        body = np.concatenate(parts)
        body[:, 2] *= pose.height_scale
        body[:, :2] *= pose.spread
        world = body @ _rot_z(pose.heading).T
        world[:, 0] += pose.x
        world[:, 1] += pose.y
        return world

    @staticmethod
    def _limb_rotation(group: str, pose: Pose) -> np.ndarray:
        match group:
            case "left_leg":
                return _rot_y(pose.leg_swing)
            case "right_leg":
                return _rot_y(-pose.leg_swing)
            case "left_arm":
                return _rot_x(pose.left_arm_raise) @ _rot_y(-pose.arm_swing)
            case "right_arm":
                return _rot_x(-pose.right_arm_raise) @ _rot_y(pose.arm_swing)
        raise ValueError(f"unknown limb group {group!r}")


def object_cluster(rng: np.random.Generator, x: float, y: float, size: float = 0.3) -> np.ndarray:
    """A box-shaped cluster of ``OBJECT_POINTS`` surface points resting on the floor."""
    unit = rng.uniform(-0.5, 0.5, size=(OBJECT_POINTS, 3))
    face = rng.integers(0, 3, size=OBJECT_POINTS)
    unit[np.arange(OBJECT_POINTS), face] = np.sign(unit[np.arange(OBJECT_POINTS), face]) * 0.5
    pts = unit * size
    pts[:, 0] += x
    pts[:, 1] += y
    pts[:, 2] += size / 2
    return pts
