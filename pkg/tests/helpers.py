"""Shared fixtures-in-function-form for the test suite."""

from __future__ import annotations

import numpy as np

from hipe import ImageTensor, ScalarField2D


def field(values) -> ScalarField2D:
    return ScalarField2D(np.asarray(values, dtype=np.float32))


def tensor(values) -> ImageTensor:
    return ImageTensor(np.asarray(values, dtype=np.float32))


def gaussian_bump(h: int, w: int, cy: float, cx: float, sigma: float) -> np.ndarray:
    """Unit-peak Gaussian bump, float32."""
    yy, xx = np.mgrid[0:h, 0:w]
    bump = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2.0 * sigma**2))
    return bump.astype(np.float32)


def hot_block(h: int, w: int, top: int, left: int, bh: int, bw: int, value: float = 1.0):
    """Field that is `value` on one rectangle and zero elsewhere."""
    out = np.zeros((h, w), dtype=np.float32)
    out[top : top + bh, left : left + bw] = value
    return out


def random_block_spec(rng: np.random.Generator, h: int, w: int, bh: int, bw: int):
    top = int(rng.integers(0, h - bh + 1))
    left = int(rng.integers(0, w - bw + 1))
    return top, left, bh, bw


def blob_image(side: int, diameter: float) -> np.ndarray:
    """Centered blurred salient blob on an otherwise dark square image."""
    from scipy import ndimage

    yy, xx = np.mgrid[0:side, 0:side]
    c = (side - 1) / 2
    disc = (((yy - c) ** 2 + (xx - c) ** 2) <= (diameter / 2.0) ** 2).astype(np.float32)
    soft = ndimage.gaussian_filter(disc, sigma=max(1.0, diameter / 8.0), mode="nearest")
    return soft.astype(np.float32)[None, :, :]


def support_bbox(field_values: np.ndarray, cutoff: float = 0.01):
    """Bounding box (top, left, bottom, right), inclusive, of the pixels
    above cutoff*max — the practical extent of a blurred blob."""
    hot = np.argwhere(field_values > cutoff * field_values.max())
    (top, left), (bottom, right) = hot.min(axis=0), hot.max(axis=0)
    return int(top), int(left), int(bottom), int(right)
