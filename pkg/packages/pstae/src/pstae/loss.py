"""Reconstruction loss between extractor descriptors and their autoencoder reconstruction.

For ``L`` frames of ``A x f`` descriptors the clip loss is the mean over frames of the squared
Frobenius norm of the per-frame difference. Per-frame terms are not divided by ``A``.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from pstae_core.errors import ShapeMismatchError
from pstae_core.tensor import DTensor, concat, squared_difference

if TYPE_CHECKING:
    from collections.abc import Sequence

    from pstae_core.tensor import TensorLike


def _shape(x: TensorLike) -> tuple[int, ...]:
    return x.shape if isinstance(x, DTensor) else np.shape(x)


def _check_frames(target: Sequence[TensorLike], recon: Sequence[TensorLike]) -> None:
    if len(target) != len(recon) or not target:
        raise ShapeMismatchError("reconstruction_loss", (len(target),), (len(recon),))
    for t, r in zip(target, recon, strict=True):
        if _shape(t) != _shape(r):
            raise ShapeMismatchError("reconstruction_loss", _shape(t), _shape(r))


def frame_terms(target: Sequence[TensorLike], recon: Sequence[TensorLike]) -> DTensor:
    """Differentiable length-L vector of ``||F_i - F_hat_i||_F^2``."""
    _check_frames(target, recon)
    terms = [squared_difference(r, t).sum().reshape(1) for t, r in zip(target, recon, strict=True)]
    return concat(terms, axis=0)


def reconstruction_loss(target: Sequence[TensorLike], recon: Sequence[TensorLike]) -> DTensor:
    return frame_terms(target, recon).mean()


def per_frame_loss(target: Sequence[TensorLike], recon: Sequence[TensorLike]) -> np.ndarray:
    return np.array(frame_terms(target, recon).data, dtype=np.float64)


def anchor_errors(target: Sequence[TensorLike], recon: Sequence[TensorLike]) -> np.ndarray:
    """(L, A) squared error of every anchor; row sums equal ``per_frame_loss``."""
    _check_frames(target, recon)
    rows = []
    for t, r in zip(target, recon, strict=True):
        t_arr = t.data if isinstance(t, DTensor) else np.asarray(t, dtype=np.float64)
        r_arr = r.data if isinstance(r, DTensor) else np.asarray(r, dtype=np.float64)
        rows.append(((t_arr - r_arr) ** 2).reshape(t_arr.shape[0], -1).sum(axis=1))
    return np.stack(rows)
