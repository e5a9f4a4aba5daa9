"""Parameter containers built on ``DTensor``."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

import numpy as np

from pstae_core.errors import ConfigurationError, ShapeMismatchError
from pstae_core.tensor import DTensor

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping

logger = logging.getLogger(__name__)


class Module:
    """Base class for anything that owns trainable tensors.

    Parameters are leaf ``DTensor`` attributes; sub-modules may be attributes or live in
    lists/tuples. Names are dotted attribute paths (``encoder.0.spatial.weight``) in
    attribute-assignment order, which keeps ``state_dict`` ordering stable.
    """

    def __call__(self, *args: Any, **kwargs: Any) -> Any:
        return self.forward(*args, **kwargs)

    def forward(self, *args: Any, **kwargs: Any) -> Any:
        raise NotImplementedError

    def named_parameters(self, prefix: str = "") -> Iterator[tuple[str, DTensor]]:
        for attr, value in vars(self).items():
            if attr.startswith("_"):
                continue
            name = f"{prefix}{attr}"
            if isinstance(value, DTensor):
                if value.is_leaf and (value.requires_grad or value.frozen):
                    yield name, value
            elif isinstance(value, Module):
                yield from value.named_parameters(f"{name}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(f"{name}.{i}.")

    def parameters(self) -> list[DTensor]:
        return [p for _, p in self.named_parameters()]

    def trainable_parameters(self) -> list[DTensor]:
        return [p for p in self.parameters() if p.requires_grad]

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def freeze(self) -> None:
        """Mark every parameter frozen: no gradient is recorded for it and SGD refuses it."""
        for p in self.parameters():
            p.requires_grad = False
            p.frozen = True
            p.grad = None

    @property
    def is_frozen(self) -> bool:
        params = self.parameters()
        return bool(params) and all(p.frozen for p in params)

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Mapping[str, np.ndarray]) -> None:
        params = dict(self.named_parameters())
        missing = sorted(set(params) - set(state))
        unexpected = sorted(set(state) - set(params))
        if missing or unexpected:
            msg = f"State does not match module: missing={missing} unexpected={unexpected}"
            raise ConfigurationError(msg)
        for name, p in params.items():
            value = np.asarray(state[name])
            if value.shape != p.shape:
                raise ShapeMismatchError(f"load_state_dict[{name}]", p.shape, value.shape)
            p.data = value.astype(p.dtype, copy=True)
        logger.debug("Loaded %d tensors into %s", len(params), type(self).__name__)


class Linear(Module):
    """Shared one-layer MLP ``x @ W + b`` with optional bias and trailing ReLU."""

    def __init__(
        self,
        in_features: int,
        out_features: int,
        *,
        rng: np.random.Generator,
        activation: bool = True,
        bias: bool = True,
        dtype: np.dtype | type = np.float64,
    ) -> None:
        if in_features < 1 or out_features < 1:
            msg = f"Linear needs positive widths, got {in_features}->{out_features}"
            raise ConfigurationError(msg)
        bound = float(np.sqrt(6.0 / (in_features + out_features)))
        self.in_features = in_features
        self.out_features = out_features
        self.activation = activation
        self.weight = DTensor(
            rng.uniform(-bound, bound, size=(in_features, out_features)),
            requires_grad=True,
            name="weight",
            dtype=dtype,
        )
        self.bias = (
            DTensor(np.zeros(out_features), requires_grad=True, name="bias", dtype=dtype)
            if bias
            else None
        )

    def forward(self, x: DTensor) -> DTensor:
        out = x @ self.weight
        if self.bias is not None:
            out = out + self.bias
        return out.relu() if self.activation else out

    def __repr__(self) -> str:
        act = ", relu" if self.activation else ""
        return f"Linear({self.in_features}->{self.out_features}{act})"
