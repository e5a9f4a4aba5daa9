"""Dense tensors with reverse-mode differentiation.

Every differentiable operation is a ``Function`` subclass: ``forward`` computes the output
from plain numpy arrays and keeps whatever it needs, ``backward`` maps the gradient of the
output to one gradient per input. ``Function.apply`` runs the forward pass and records the
function on the result when any input requires a gradient. ``DTensor.backward`` then walks
the recorded graph in reverse topological order and deposits gradients on the leaves.

Gradient conventions:
- ``relu`` has subgradient 0 at exactly 0.
- ``max`` routes the incoming gradient to the argmax of each reduced slice only; ties go to
  the lowest index.
- Broadcasting in ``add``/``sub``/``mul``/``squared_difference`` is undone in the backward
  pass by summing over the broadcast axes.
"""

from __future__ import annotations

import contextlib
from contextvars import ContextVar
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy import sparse

from pstae_core.errors import NumericError, ShapeMismatchError, UsageError

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

_grad_enabled: ContextVar[bool] = ContextVar("pstae_grad_enabled", default=True)


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Run the enclosed forward passes without recording a graph."""
    token = _grad_enabled.set(False)
    try:
        yield
    finally:
        _grad_enabled.reset(token)


def is_grad_enabled() -> bool:
    return _grad_enabled.get()


def _as_float_array(data: Any, dtype: np.dtype | type | str | None) -> np.ndarray:
    arr = np.array(data, dtype=dtype, copy=True)
    if dtype is None and not np.issubdtype(arr.dtype, np.floating):
        arr = arr.astype(np.float64)
    return arr


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` over the axes that broadcasting added or stretched to reach ``shape``."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class DTensor:
    """A dense array that can take part in reverse-mode differentiation."""

    __slots__ = ("data", "grad", "requires_grad", "frozen", "name", "_ctx")
    __array_priority__ = 1000

    def __init__(
        self,
        data: Any,
        *,
        requires_grad: bool = False,
        name: str | None = None,
        dtype: np.dtype | type | str | None = None,
    ) -> None:
        self.data: np.ndarray = _as_float_array(data, dtype)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.frozen = False
        self.name = name
        self._ctx: Function | None = None

    @classmethod
    def _from_op(cls, data: np.ndarray, ctx: Function | None) -> DTensor:
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.requires_grad = ctx is not None
        out.frozen = False
        out.name = None
        out._ctx = ctx
        return out

    # -- introspection -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self._ctx is None

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def detach(self) -> DTensor:
        return DTensor._from_op(self.data, None)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"DTensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"

    # -- backward ------------------------------------------------------------

    def backward(self) -> None:
        """Accumulate d(self)/d(leaf) into ``leaf.grad`` for every leaf requiring a gradient."""
        if self.data.size != 1:
            raise UsageError(f"backward() needs a scalar output, got shape {self.shape}")
        if not self.requires_grad:
            raise UsageError("backward() called on a tensor that does not require grad")

        pending: dict[int, np.ndarray] = {id(self): np.ones_like(self.data)}
        for node in reversed(self._topological_order()):
            grad = pending.pop(id(node), None)
            if grad is None:
                continue
            ctx = node._ctx
            if ctx is None:
                node.grad = np.array(grad, copy=True) if node.grad is None else node.grad + grad
                continue
            for parent, parent_grad in zip(ctx.parents, ctx.backward(grad), strict=True):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                pending[key] = parent_grad if key not in pending else pending[key] + parent_grad

    def _topological_order(self) -> list[DTensor]:
        order: list[DTensor] = []
        visited: set[int] = set()
        stack: list[tuple[DTensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            if node._ctx is not None:
                for parent in node._ctx.parents:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return order

    # -- operators -------------------------------------------------------------

    def __add__(self, other: Any) -> DTensor:
        return Add.apply(self, other)

    def __radd__(self, other: Any) -> DTensor:
        return Add.apply(other, self)

    def __sub__(self, other: Any) -> DTensor:
        return Sub.apply(self, other)

    def __rsub__(self, other: Any) -> DTensor:
        return Sub.apply(other, self)

    def __mul__(self, other: Any) -> DTensor:
        return Mul.apply(self, other)

    def __rmul__(self, other: Any) -> DTensor:
        return Mul.apply(other, self)

    def __neg__(self) -> DTensor:
        return Mul.apply(self, -1.0)

    def __matmul__(self, other: Any) -> DTensor:
        return MatMul.apply(self, other)

    def __getitem__(self, key: Any) -> DTensor:
        return GetItem.apply(self, key=key)

    def relu(self) -> DTensor:
        return ReLU.apply(self)

    def max(self, axis: int | None = None) -> DTensor:
        return Max.apply(self, axis=axis)

    def sum(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> DTensor:
        return Sum.apply(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | tuple[int, ...] | None = None) -> DTensor:
        return Mean.apply(self, axis=axis)

    def reshape(self, *shape: int) -> DTensor:
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Reshape.apply(self, shape=tuple(shape))

    def gather(self, index: np.ndarray) -> DTensor:
        return Gather.apply(self, index=index)


TensorLike = DTensor | np.ndarray | float | int


class Function:
    """One differentiable operation; subclasses implement ``forward`` and ``backward``."""

    def __init__(self, *parents: DTensor) -> None:
        self.parents = parents

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray | None, ...]:
        raise NotImplementedError

    @classmethod
    def apply(cls, *inputs: TensorLike, **kwargs: Any) -> DTensor:
        dtype = next((x.dtype for x in inputs if isinstance(x, DTensor)), None)
        tensors = tuple(x if isinstance(x, DTensor) else DTensor(x, dtype=dtype) for x in inputs)
        fn = cls(*tensors)
        out = fn.forward(*(t.data for t in tensors), **kwargs)
        if not np.all(np.isfinite(out)):
            raise NumericError(cls.__name__)
        track = _grad_enabled.get() and any(t.requires_grad for t in tensors)
        return DTensor._from_op(out, fn if track else None)


def _broadcast_or_raise(op: str, x: np.ndarray, y: np.ndarray) -> None:
    try:
        np.broadcast_shapes(x.shape, y.shape)
    except ValueError:
        raise ShapeMismatchError(op, x.shape, y.shape) from None


class Add(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        _broadcast_or_raise("add", x, y)
        self.shapes = (x.shape, y.shape)
        return x + y

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(grad, self.shapes[0]), _unbroadcast(grad, self.shapes[1])


class Sub(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        _broadcast_or_raise("sub", x, y)
        self.shapes = (x.shape, y.shape)
        return x - y

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return _unbroadcast(grad, self.shapes[0]), _unbroadcast(-grad, self.shapes[1])


class Mul(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        _broadcast_or_raise("mul", x, y)
        self.x, self.y = x, y
        return x * y

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return (
            _unbroadcast(grad * self.y, self.x.shape),
            _unbroadcast(grad * self.x, self.y.shape),
        )


class MatMul(Function):
    """``x @ w`` for ``x`` of shape (..., k) and a 2-D ``w`` of shape (k, m)."""

    def forward(self, x: np.ndarray, w: np.ndarray) -> np.ndarray:
        if w.ndim != 2 or x.ndim < 1 or x.shape[-1] != w.shape[0]:
            raise ShapeMismatchError("matmul", x.shape, w.shape)
        self.x, self.w = x, w
        return x @ w

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k, m = self.w.shape
        grad_x = grad @ self.w.T
        grad_w = self.x.reshape(-1, k).T @ grad.reshape(-1, m)
        return grad_x, grad_w


class ReLU(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.mask = x > 0
        return np.where(self.mask, x, 0.0).astype(x.dtype, copy=False)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad * self.mask,)


class Max(Function):
    def forward(self, x: np.ndarray, axis: int | None = None) -> np.ndarray:
        self.shape = x.shape
        self.axis = axis
        if axis is None:
            self.index = int(np.argmax(x))
            return np.asarray(x.reshape(-1)[self.index])
        self.index = np.expand_dims(np.argmax(x, axis=axis), axis)
        return np.take_along_axis(x, self.index, axis=axis).squeeze(axis)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        out = np.zeros(self.shape, dtype=grad.dtype)
        if self.axis is None:
            out.reshape(-1)[self.index] = grad
        else:
            np.put_along_axis(out, self.index, np.expand_dims(grad, self.axis), axis=self.axis)
        return (out,)


class Sum(Function):
    def forward(
        self,
        x: np.ndarray,
        axis: int | tuple[int, ...] | None = None,
        keepdims: bool = False,
    ) -> np.ndarray:
        self.shape, self.axis, self.keepdims = x.shape, axis, keepdims
        return np.asarray(x.sum(axis=axis, keepdims=keepdims))

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        if self.axis is not None and not self.keepdims:
            grad = np.expand_dims(grad, self.axis)
        return (np.array(np.broadcast_to(grad, self.shape)),)


class Mean(Function):
    def forward(self, x: np.ndarray, axis: int | tuple[int, ...] | None = None) -> np.ndarray:
        self.shape, self.axis = x.shape, axis
        out = np.asarray(x.mean(axis=axis))
        self.count = x.size // max(out.size, 1) if x.size else 1
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        if self.axis is not None:
            grad = np.expand_dims(grad, self.axis)
        return (np.array(np.broadcast_to(grad / self.count, self.shape)),)


class SquaredDifference(Function):
    def forward(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        _broadcast_or_raise("squared_difference", x, y)
        self.shapes = (x.shape, y.shape)
        self.diff = x - y
        return self.diff * self.diff

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        g = 2.0 * self.diff * grad
        return _unbroadcast(g, self.shapes[0]), _unbroadcast(-g, self.shapes[1])


class Reshape(Function):
    def forward(self, x: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
        self.shape = x.shape
        try:
            return x.reshape(shape)
        except ValueError:
            raise ShapeMismatchError("reshape", x.shape, shape) from None

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (grad.reshape(self.shape),)


class Concat(Function):
    def forward(self, *arrays: np.ndarray, axis: int = -1) -> np.ndarray:
        try:
            out = np.concatenate(arrays, axis=axis)
        except ValueError:
            raise ShapeMismatchError("concat", *(a.shape for a in arrays)) from None
        self.axis = axis
        self.splits = np.cumsum([a.shape[axis] for a in arrays])[:-1]
        return out

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray, ...]:
        return tuple(np.split(grad, self.splits, axis=self.axis))


class GetItem(Function):
    """Basic (slice) indexing; use ``Gather`` for integer-array indexing."""

    def forward(self, x: np.ndarray, key: Any) -> np.ndarray:
        self.shape, self.key = x.shape, key
        return np.array(x[key])

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        out = np.zeros(self.shape, dtype=grad.dtype)
        out[self.key] = grad
        return (out,)


class Gather(Function):
    """Row gather ``x[index]`` along axis 0; repeated rows accumulate their gradients."""

    def forward(self, x: np.ndarray, index: np.ndarray) -> np.ndarray:
        self.shape = x.shape
        self.index = np.asarray(index, dtype=np.intp)
        if self.index.size and (self.index.min() < 0 or self.index.max() >= x.shape[0]):
            raise ShapeMismatchError("gather", x.shape, self.index.shape)
        return x[self.index]

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        out = np.zeros(self.shape, dtype=grad.dtype)
        np.add.at(out, self.index.reshape(-1), grad.reshape((-1, *self.shape[1:])))
        return (out,)


class SparseMatMul(Function):
    """``matrix @ x`` for a constant ``matrix`` and a 2-D tensor ``x``.

    ``matrix`` may be any scipy sparse format or a dense array; it is held as CSR.
    """

    def forward(
        self, x: np.ndarray, matrix: sparse.sparray | sparse.spmatrix | np.ndarray
    ) -> np.ndarray:
        matrix = sparse.csr_array(matrix)
        if x.ndim != 2 or matrix.shape[1] != x.shape[0]:
            raise ShapeMismatchError("sparse_matmul", matrix.shape, x.shape)
        self.matrix = matrix
        return np.asarray(matrix @ x, dtype=x.dtype)

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        return (np.asarray(self.matrix.T @ grad, dtype=grad.dtype),)


class CrossEntropy(Function):
    """Softmax cross-entropy of 1-D ``logits`` against an integer class ``target``."""

    def forward(self, logits: np.ndarray, target: int) -> np.ndarray:
        if logits.ndim != 1 or not 0 <= target < logits.shape[0]:
            raise ShapeMismatchError("cross_entropy", logits.shape, (target,))
        shifted = logits - logits.max()
        exp = np.exp(shifted)
        total = exp.sum()
        self.probs = exp / total
        self.target = target
        return np.asarray(np.log(total) - shifted[target])

    def backward(self, grad: np.ndarray) -> tuple[np.ndarray]:
        g = self.probs.copy()
        g[self.target] -= 1.0
        return (g * grad,)


# -- functional API ---------------------------------------------------------------


def add(x: TensorLike, y: TensorLike) -> DTensor:
    return Add.apply(x, y)


def matmul(x: TensorLike, w: TensorLike) -> DTensor:
    return MatMul.apply(x, w)


def relu(x: TensorLike) -> DTensor:
    return ReLU.apply(x)


def max(x: TensorLike, axis: int | None = None) -> DTensor:  # noqa: A001
    return Max.apply(x, axis=axis)


def sum(x: TensorLike, axis: int | tuple[int, ...] | None = None) -> DTensor:  # noqa: A001
    return Sum.apply(x, axis=axis)


def mean(x: TensorLike, axis: int | tuple[int, ...] | None = None) -> DTensor:
    return Mean.apply(x, axis=axis)


def squared_difference(x: TensorLike, y: TensorLike) -> DTensor:
    return SquaredDifference.apply(x, y)


def concat(tensors: Sequence[TensorLike], axis: int = -1) -> DTensor:
    return Concat.apply(*tensors, axis=axis)


def gather(x: TensorLike, index: np.ndarray) -> DTensor:
    return Gather.apply(x, index=index)


def sparse_matmul(
    matrix: sparse.sparray | sparse.spmatrix | np.ndarray, x: TensorLike
) -> DTensor:
    return SparseMatMul.apply(x, matrix=matrix)


def cross_entropy(logits: TensorLike, target: int) -> DTensor:
    return CrossEntropy.apply(logits, target=int(target))


def mse_loss(x: TensorLike, x_hat: TensorLike) -> DTensor:
    """Mean squared error over every entry; both operands must have identical shapes."""
    x_shape = x.shape if isinstance(x, DTensor) else np.shape(x)
    x_hat_shape = x_hat.shape if isinstance(x_hat, DTensor) else np.shape(x_hat)
    if tuple(x_shape) != tuple(x_hat_shape):
        raise ShapeMismatchError("mse_loss", x_shape, x_hat_shape)
    return Mean.apply(SquaredDifference.apply(x, x_hat))
