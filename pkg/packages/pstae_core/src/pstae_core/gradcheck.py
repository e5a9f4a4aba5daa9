"""Finite-difference verification of reverse-mode gradients."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from pstae_core.errors import ConfigurationError, NumericError, UsageError

if TYPE_CHECKING:
    from collections.abc import Callable

    from pstae_core.tensor import DTensor

logger = logging.getLogger(__name__)


def _evaluate(graph: Callable[[], DTensor]) -> float:
    out = graph()
    if out.size != 1:
        raise UsageError(f"gradient_check needs a scalar graph output, got shape {out.shape}")
    value = out.item()
    if not np.isfinite(value):
        raise NumericError("gradient_check", "graph output is not finite")
    return value


def gradient_check(
    graph: Callable[[], DTensor],
    leaf: DTensor,
    epsilon: float = 1e-5,
    *,
    denominator_floor: float = 1e-8,
) -> float:
    """Largest relative error between analytic and central-difference gradients of ``leaf``.

    ``graph`` rebuilds the scalar output from scratch on every call; ``leaf.data`` is nudged in
    place and restored. The relative error of one entry is
    ``|analytic - numeric| / max(|analytic|, |numeric|, denominator_floor)``.
    """
    if leaf.dtype == np.float64 and not 1e-6 <= epsilon <= 1e-3:
        msg = f"epsilon must lie in [1e-6, 1e-3] for 64-bit values, got {epsilon}"
        raise ConfigurationError(msg)

    leaf.grad = None
    out = graph()
    if out.size != 1:
        raise UsageError(f"gradient_check needs a scalar graph output, got shape {out.shape}")
    if out.requires_grad:
        out.backward()
    analytic = np.zeros_like(leaf.data) if leaf.grad is None else leaf.grad.copy()
    leaf.grad = None

    numeric = np.zeros_like(leaf.data)
    flat = leaf.data.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + epsilon
        plus = _evaluate(graph)
        flat[i] = original - epsilon
        minus = _evaluate(graph)
        flat[i] = original
        numeric.reshape(-1)[i] = (plus - minus) / (2.0 * epsilon)

    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), denominator_floor)
    errors = np.abs(analytic - numeric) / denom
    worst = float(errors.max()) if errors.size else 0.0
    logger.debug("gradient_check over %d entries: max relative error %.3e", errors.size, worst)
    return worst
