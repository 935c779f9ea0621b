"""Dense 2-D/3-D array value types used throughout the package.

Layout convention everywhere: row-major for 2-D fields, channel-major
then row-major for 3-D tensors. Element type is 32-bit float; wider
precision appears only inside accumulators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

__all__ = ["ScalarField2D", "ImageTensor", "RectRegion"]


def _freeze(values, shape_rank: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float32, copy=True)
    if arr.ndim != shape_rank:
        raise DimensionError(f"{what} must be {shape_rank}-D, got {arr.ndim}-D")
    if any(n < 1 for n in arr.shape):
        raise DimensionError(f"{what} has an empty dimension: {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ScalarField2D:
    """Immutable h x w map of finite float32 values (saliency maps, weight fields)."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values, 2, "ScalarField2D"))

    @classmethod
    def zeros(cls, height: int, width: int) -> "ScalarField2D":
        return cls(np.zeros((height, width), dtype=np.float32))

    @classmethod
    def _wrap(cls, values: np.ndarray) -> "ScalarField2D":
        # Fast path for freshly computed arrays the caller owns; skips
        # the copy and finiteness scan, so the caller must guarantee both.
        obj = object.__new__(cls)
        values.setflags(write=False)
        object.__setattr__(obj, "values", values)
        return obj

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __repr__(self) -> str:
        return f"ScalarField2D({self.height}x{self.width})"


@dataclass(frozen=True, eq=False)
class ImageTensor:
    """Immutable c x h x w input sample, channel-major, finite float32."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values, 3, "ImageTensor"))

    @classmethod
    def zeros(cls, channels: int, height: int, width: int) -> "ImageTensor":
        return cls(np.zeros((channels, height, width), dtype=np.float32))

    @classmethod
    def _wrap(cls, values: np.ndarray) -> "ImageTensor":
        # See ScalarField2D._wrap.
        obj = object.__new__(cls)
        values.setflags(write=False)
        object.__setattr__(obj, "values", values)
        return obj

    @property
    def channels(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def __repr__(self) -> str:
        return f"ImageTensor({self.channels}x{self.height}x{self.width})"


@dataclass(frozen=True)
class RectRegion:
    """Axis-aligned pixel rectangle inside a host array."""

    top: int
    left: int
    height: int
    width: int

    def __post_init__(self):
        if self.top < 0 or self.left < 0:
            raise DimensionError(f"region origin must be non-negative: {self}")
        if self.height < 1 or self.width < 1:
            raise DimensionError(f"region extent must be at least 1x1: {self}")

    def check_within(self, host_height: int, host_width: int) -> None:
        if self.top + self.height > host_height or self.left + self.width > host_width:
            raise DimensionError(
                f"{self} does not fit inside a {host_height}x{host_width} host"
            )

    @property
    def rows(self) -> slice:
        return slice(self.top, self.top + self.height)

    @property
    def cols(self) -> slice:
        return slice(self.left, self.left + self.width)

    @property
    def area(self) -> int:
        return self.height * self.width
