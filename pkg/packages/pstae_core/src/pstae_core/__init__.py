"""Core numerics for PSTAE: tensors with reverse-mode gradients, modules, SGD, checkpoints."""

from pstae_core.checkpoint import (
    PSTW_VERSION,
    load_module,
    read_checkpoint,
    save_module,
    write_checkpoint,
)
from pstae_core.errors import (
    ConfigurationError,
    FormatError,
    FrozenParameterError,
    NumericError,
    PstaeError,
    ShapeMismatchError,
    SingleClassError,
    UsageError,
)
from pstae_core.gradcheck import gradient_check
from pstae_core.nn import Linear, Module
from pstae_core.optim import SgdConfig, sgd_step
from pstae_core.tensor import DTensor, Function, mse_loss, no_grad

__all__ = [
    "PSTW_VERSION",
    "ConfigurationError",
    "DTensor",
    "FormatError",
    "FrozenParameterError",
    "Function",
    "Linear",
    "Module",
    "NumericError",
    "PstaeError",
    "SgdConfig",
    "ShapeMismatchError",
    "SingleClassError",
    "UsageError",
    "gradient_check",
    "load_module",
    "mse_loss",
    "no_grad",
    "read_checkpoint",
    "save_module",
    "sgd_step",
    "write_checkpoint",
]
