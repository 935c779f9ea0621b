"""PNG decode/encode and heatmap rendering.

Grayscale PNGs become 1-channel tensors, RGB PNGs 3-channel, both scaled
to [0, 1]. Heatmaps use a fixed 256-entry colormap (dark violet through
teal to yellow) built once from the anchor table below, so renders are
reproducible for golden-file comparison.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image

from .arrays import ImageTensor, ScalarField2D
from .errors import DimensionError

__all__ = ["load_image", "save_image", "render_heatmap", "COLORMAP"]

# (position in [0,1], r, g, b) anchors; intermediate entries are linear blends.
_ANCHORS = (
    (0.000, 68, 1, 84),
    (0.125, 72, 40, 120),
    (0.250, 62, 74, 137),
    (0.375, 49, 104, 142),
    (0.500, 38, 130, 142),
    (0.625, 31, 158, 137),
    (0.750, 53, 183, 121),
    (0.875, 109, 205, 89),
    (1.000, 253, 231, 37),
)


def _build_colormap() -> np.ndarray:
    pos = np.array([a[0] for a in _ANCHORS])
    rgb = np.array([a[1:] for a in _ANCHORS], dtype=np.float64)
    t = np.linspace(0.0, 1.0, 256)
    table = np.stack([np.interp(t, pos, rgb[:, c]) for c in range(3)], axis=1)
    table = np.rint(table).astype(np.uint8)
    table.setflags(write=False)
    return table


COLORMAP = _build_colormap()  # 256 x 3 uint8, entry 0 coldest, entry 255 hottest


def load_image(path: Union[str, Path]) -> ImageTensor:
    """Decode a PNG into a float tensor scaled to [0, 1]."""
    with Image.open(path) as img:
        if img.mode == "L":
            arr = np.asarray(img, dtype=np.float32)[None, :, :]
        else:
            arr = np.asarray(img.convert("RGB"), dtype=np.float32).transpose(2, 0, 1)
    return ImageTensor(arr / 255.0)


def save_image(tensor: ImageTensor, path: Union[str, Path]) -> None:
    """Encode a 1- or 3-channel tensor with values in [0, 1] as an 8-bit PNG."""
    if tensor.channels not in (1, 3):
        raise DimensionError(f"PNG output needs 1 or 3 channels, got {tensor.channels}")
    data = np.clip(tensor.values, 0.0, 1.0)
    pixels = np.rint(data * 255.0).astype(np.uint8)
    if tensor.channels == 1:
        img = Image.fromarray(pixels[0], mode="L")
    else:
        img = Image.fromarray(pixels.transpose(1, 2, 0), mode="RGB")
    img.save(path, format="PNG")


def _normalize_unit(values: np.ndarray) -> np.ndarray:
    # Min-max to [0, 1] on a copy; a constant map lands mid-scale.
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return np.full(values.shape, 0.5, dtype=np.float64)
    return (values.astype(np.float64) - lo) / (hi - lo)


def _luminance(overlay: ImageTensor) -> np.ndarray:
    v = overlay.values.astype(np.float64)
    if overlay.channels == 3:
        lum = 0.299 * v[0] + 0.587 * v[1] + 0.114 * v[2]
    else:
        lum = v.mean(axis=0)
    return np.clip(lum, 0.0, 1.0)


def colorize(field: ScalarField2D) -> np.ndarray:
    """Min-max normalize and map through the colormap; returns h x w x 3 uint8."""
    unit = _normalize_unit(field.values)
    idx = np.rint(unit * 255.0).astype(np.intp)
    return COLORMAP[idx]


def render_heatmap(
    field: ScalarField2D,
    path: Union[str, Path],
    overlay: Optional[ImageTensor] = None,
) -> None:
    """Write the map as a PNG heatmap, optionally 0.5-alpha-blended over
    the overlay's luminance. The input map is never modified."""
    rgb = colorize(field).astype(np.float64)
    if overlay is not None:
        if (overlay.height, overlay.width) != field.shape:
            raise DimensionError(
                f"overlay {overlay.height}x{overlay.width} does not match "
                f"map {field.height}x{field.width}"
            )
        gray = _luminance(overlay) * 255.0
        rgb = 0.5 * rgb + 0.5 * gray[:, :, None]
    Image.fromarray(np.rint(rgb).astype(np.uint8), mode="RGB").save(path, format="PNG")
