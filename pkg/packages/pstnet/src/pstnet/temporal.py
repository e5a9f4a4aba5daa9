"""Temporal anchor/window arithmetic for point-tube layers."""

from __future__ import annotations

from dataclasses import dataclass

from pstae_core.errors import ConfigurationError


@dataclass(frozen=True)
class TemporalPlan:
    """Frame bookkeeping for one temporal (or transposed temporal) layer.

    For a forward plan ``anchor_frames[k]`` is the centre of output frame ``k`` in input-frame
    coordinates, and its window spans ``anchor - radius .. anchor + radius``. For a transposed
    plan ``anchor_frames[k]`` is the output frame that input frame ``k`` scatters its
    ``delta = 0`` slice to; slice ``delta`` lands on ``anchor_frames[k] + delta``.
    """

    input_length: int
    radius: int
    stride: int
    padding: tuple[int, int]
    output_length: int
    anchor_frames: tuple[int, ...]
    transposed: bool = False

    @property
    def offsets(self) -> range:
        return range(-self.radius, self.radius + 1)

    def window(self, k: int) -> list[int | None]:
        """Input frames feeding output frame ``k``; ``None`` marks a padding frame."""
        centre = self.anchor_frames[k]
        return [
            centre + o if 0 <= centre + o < self.input_length else None for o in self.offsets
        ]

    def sources(self, j: int) -> list[tuple[int, int]]:
        """(input frame, slice) pairs that land on output frame ``j`` of a transposed plan."""
        found = []
        for k, base in enumerate(self.anchor_frames):
            delta = j - base
            if 0 <= delta <= 2 * self.radius:
                found.append((k, delta))
        return found


def _check(radius: int, stride: int, input_length: int) -> None:
    if radius < 0 or stride < 1 or input_length < 1:
        msg = f"invalid temporal layer: radius={radius} stride={stride} length={input_length}"
        raise ConfigurationError(msg)


def temporal_plan(
    input_length: int, radius: int, stride: int, p_begin: int = 0, p_end: int = 0
) -> TemporalPlan:
    _check(radius, stride, input_length)
    span = input_length + p_begin + p_end - (2 * radius + 1)
    output_length = span // stride + 1
    if span < 0 or output_length < 1:
        msg = (
            f"temporal plan infeasible: {input_length} frames with radius {radius}, "
            f"stride {stride}, padding [{p_begin},{p_end}]"
        )
        raise ConfigurationError(msg)
    anchors = tuple(radius - p_begin + k * stride for k in range(output_length))
    if anchors[0] < 0 or anchors[-1] >= input_length:
        msg = f"temporal plan puts an anchor frame outside [0, {input_length}): {anchors}"
        raise ConfigurationError(msg)
    return TemporalPlan(
        input_length=input_length,
        radius=radius,
        stride=stride,
        padding=(p_begin, p_end),
        output_length=output_length,
        anchor_frames=anchors,
    )


def transposed_temporal_plan(
    input_length: int, radius: int, stride: int, p_begin: int = 0, p_end: int = 0
) -> TemporalPlan:
    """Plan for a transposed layer; negative padding trims the output symmetrically."""
    _check(radius, stride, input_length)
    output_length = (input_length - 1) * stride + 2 * radius + 1 + p_begin + p_end
    if output_length < 1:
        msg = (
            f"transposed temporal plan infeasible: {input_length} frames with radius {radius}, "
            f"stride {stride}, padding [{p_begin},{p_end}]"
        )
        raise ConfigurationError(msg)
    plan = TemporalPlan(
        input_length=input_length,
        radius=radius,
        stride=stride,
        padding=(p_begin, p_end),
        output_length=output_length,
        anchor_frames=tuple(k * stride + p_begin for k in range(input_length)),
        transposed=True,
    )
    empty = [j for j in range(output_length) if not plan.sources(j)]
    if empty:
        raise ConfigurationError(f"transposed temporal plan leaves output frames {empty} empty")
    return plan
