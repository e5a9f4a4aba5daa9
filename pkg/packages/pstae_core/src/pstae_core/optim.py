"""Plain stochastic gradient descent with a single step decay."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from pydantic import BaseModel, Field, model_validator

from pstae_core.errors import FrozenParameterError, UsageError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from pstae_core.tensor import DTensor

logger = logging.getLogger(__name__)


class SgdConfig(BaseModel):
    learning_rate: float = Field(default=0.01, gt=0, description="Base learning rate")
    decay_factor: float = Field(
        default=0.1,
        description="Multiplier applied once the decay epoch is reached",
    )
    decay_epoch: int = Field(
        default=10, ge=1, description="First (1-based) epoch trained at the decayed rate"
    )
    epochs: int = Field(default=15, ge=1, description="Number of passes over the training set")
    batch_size: int = Field(default=8, ge=1, description="Clips per gradient step")

    @model_validator(mode="after")
    def _decay_in_range(self) -> SgdConfig:
        if not 0.0 < self.decay_factor <= 1.0:
            msg = f"decay_factor must lie in (0, 1], got {self.decay_factor}"
            raise ValueError(msg)
        return self

    def learning_rate_at(self, epoch: int) -> float:
        """Learning rate for a 1-based ``epoch``: one decay step from ``decay_epoch`` on."""
        if epoch >= self.decay_epoch:
            return self.learning_rate * self.decay_factor
        return self.learning_rate


def sgd_step(params: Sequence[DTensor], config: SgdConfig, epoch: int) -> float:
    """Apply ``p <- p - lr(epoch) * grad`` to every parameter and clear the gradients.

    All parameters are validated before any is touched, so a failed step leaves the model
    unchanged. Returns the learning rate used.
    """
    for i, p in enumerate(params):
        label = p.name or f"param[{i}]"
        if p.frozen:
            raise FrozenParameterError(label)
        if p.grad is None:
            msg = f"Parameter '{label}' has no gradient; call backward() before sgd_step()"
            raise UsageError(msg)

    lr = config.learning_rate_at(epoch)
    for p in params:
        assert p.grad is not None
        p.data -= (lr * p.grad).astype(p.data.dtype, copy=False)
        p.grad = None
    return lr
