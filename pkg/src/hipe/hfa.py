"""HFA array file format: portable bit-exact storage for fields and tensors.

Layout, all little-endian:
    magic  ``HFA1``          4 bytes
    rank   u8, 2 or 3
    dims   rank x u32
    data   product(dims) x IEEE-754 binary32

Rank 2 round-trips :class:`ScalarField2D`, rank 3 :class:`ImageTensor`.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Union

import numpy as np

from .arrays import ImageTensor, ScalarField2D
from .errors import HfaFormatError, HfaTruncatedError

__all__ = ["load_array", "save_array", "MAGIC"]

MAGIC = b"HFA1"

ArrayLike = Union[ScalarField2D, ImageTensor]


def save_array(array: ArrayLike, path: Union[str, Path]) -> None:
    """Write a field or tensor to `path`; load_array reproduces it bit-exactly."""
    if not isinstance(array, (ScalarField2D, ImageTensor)):
        raise TypeError(f"expected ScalarField2D or ImageTensor, got {type(array).__name__}")
    dims = array.values.shape
    header = MAGIC + struct.pack("<B", len(dims)) + struct.pack(f"<{len(dims)}I", *dims)
    payload = np.ascontiguousarray(array.values, dtype="<f4").tobytes()
    Path(path).write_bytes(header + payload)


def load_array(path: Union[str, Path]) -> ArrayLike:
    """Read an HFA file; returns ScalarField2D for rank 2, ImageTensor for rank 3."""
    blob = Path(path).read_bytes()
    if len(blob) < 5 or blob[:4] != MAGIC:
        raise HfaFormatError(f"{path}: not an HFA file (bad magic)")
    rank = blob[4]
    if rank not in (2, 3):
        raise HfaFormatError(f"{path}: unsupported rank {rank}")
    header_end = 5 + 4 * rank
    if len(blob) < header_end:
        raise HfaTruncatedError(f"{path}: header cut short")
    dims = struct.unpack(f"<{rank}I", blob[5:header_end])
    if any(n < 1 for n in dims):
        raise HfaFormatError(f"{path}: empty dimension in {dims}")
    count = int(np.prod(dims, dtype=np.int64))
    expected = header_end + 4 * count
    if len(blob) < expected:
        raise HfaTruncatedError(
            f"{path}: payload holds {(len(blob) - header_end) // 4} of {count} values"
        )
    if len(blob) > expected:
        raise HfaFormatError(f"{path}: {len(blob) - expected} trailing bytes after payload")
    values = np.frombuffer(blob, dtype="<f4", count=count, offset=header_end).reshape(dims)
    if rank == 2:
        return ScalarField2D(values)
    return ImageTensor(values)
