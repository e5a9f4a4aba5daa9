"""PSTW weight checkpoints.

Layout (all integers little-endian)::

    b"PSTW"  u32 version
    repeated until EOF:
        u32 name_length  name (UTF-8)
        u32 rank  u64 dims[rank]
        f32 values[prod(dims)]
"""

from __future__ import annotations

import logging
import struct
from typing import TYPE_CHECKING

import numpy as np

from pstae_core.errors import FormatError

if TYPE_CHECKING:
    from collections.abc import Mapping
    from pathlib import Path

    from pstae_core.nn import Module

logger = logging.getLogger(__name__)

PSTW_MAGIC = b"PSTW"
PSTW_VERSION = 1


def write_checkpoint(path: Path, state: Mapping[str, np.ndarray]) -> None:
    chunks = [PSTW_MAGIC, struct.pack("<I", PSTW_VERSION)]
    for name, array in state.items():
        encoded = name.encode("utf-8")
        values = np.asarray(array)
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", values.ndim))
        chunks.append(np.asarray(values.shape, dtype="<u8").tobytes())
        chunks.append(values.astype("<f4").tobytes())
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(b"".join(chunks))
    logger.info("Wrote checkpoint %s (%d tensors)", path, len(state))


def read_checkpoint(path: Path) -> dict[str, np.ndarray]:
    """Read every record of a PSTW file; values come back as float64 arrays."""
    blob = path.read_bytes()
    if blob[:4] != PSTW_MAGIC:
        raise FormatError(path, "missing PSTW magic")
    if len(blob) < 8:
        raise FormatError(path, "truncated header")
    (version,) = struct.unpack_from("<I", blob, 4)
    if version != PSTW_VERSION:
        raise FormatError(path, f"unsupported PSTW version {version}")

    state: dict[str, np.ndarray] = {}
    offset = 8
    try:
        while offset < len(blob):
            (name_len,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            name = blob[offset : offset + name_len].decode("utf-8")
            offset += name_len
            (rank,) = struct.unpack_from("<I", blob, offset)
            offset += 4
            dims = (
                np.frombuffer(blob, dtype="<u8", count=rank, offset=offset)
                if rank
                else np.zeros(0, dtype=np.uint64)
            )
            offset += 8 * rank
            count = int(np.prod(dims)) if rank else 1
            values = np.frombuffer(blob, dtype="<f4", count=count, offset=offset)
            offset += 4 * count
            state[name] = values.astype(np.float64).reshape(tuple(int(d) for d in dims))
    except (struct.error, ValueError, UnicodeDecodeError) as exc:
        raise FormatError(path, f"corrupt record at byte {offset}: {exc}") from None
    return state


def save_module(path: Path, module: Module) -> None:
    write_checkpoint(path, module.state_dict())


def load_module(path: Path, module: Module) -> None:
    module.load_state_dict(read_checkpoint(path))
