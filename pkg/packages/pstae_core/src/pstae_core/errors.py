"""Exception hierarchy shared by every package in the workspace."""

from __future__ import annotations

from collections.abc import Sequence


class PstaeError(Exception):
    """Root of all errors raised deliberately by this workspace."""


class ConfigurationError(PstaeError, ValueError):
    pass


class ShapeMismatchError(ConfigurationError):
    def __init__(self, op: str, *shapes: Sequence[int]) -> None:
        self.op = op
        self.shapes = [tuple(s) for s in shapes]
        rendered = " vs ".join(str(s) for s in self.shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")


class UsageError(PstaeError, RuntimeError):
    pass


class FrozenParameterError(UsageError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Parameter '{name}' is frozen and cannot be updated")


class NumericError(PstaeError, ArithmeticError):
    def __init__(self, where: str, detail: str = "non-finite value encountered") -> None:
        self.where = where
        super().__init__(f"{where}: {detail}")


class FormatError(PstaeError, ValueError):
    def __init__(self, path: object, detail: str) -> None:
        self.path = path
        super().__init__(f"{path}: {detail}")


class SingleClassError(ConfigurationError):
    def __init__(self, label: int) -> None:
        self.label = label
        super().__init__(f"AUROC is undefined: every label is {label}")
