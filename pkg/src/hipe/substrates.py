"""Perturbation substrates: the replacement content written into perturbed regions.

Four kinds are supported: the local per-channel mean of the region, zero,
a Gaussian-blurred copy of the input, and seeded uniform noise. All are
pure functions of their inputs; noise values depend only on
(seed, channel, row, col) so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .arrays import ImageTensor, RectRegion, ScalarField2D
from .errors import DimensionError, UnsupportedSubstrateError

__all__ = [
    "SubstrateKind",
    "LocalMean",
    "Zero",
    "Blur",
    "UniformNoise",
    "parse_substrate",
    "perturb",
    "perturb_full_mask",
    "region_perturber",
    "substrate_field",
]


@dataclass(frozen=True)
class LocalMean:
    """Replace the region with its own per-channel arithmetic mean."""


@dataclass(frozen=True)
class Zero:
    """Replace the region with zeros."""


@dataclass(frozen=True)
class Blur:
    """Replace the region with a Gaussian-blurred copy of the whole input.

    Separable kernel, radius ceil(3*sigma), replicated edges.
    """

    sigma: float = 10.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"blur sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class UniformNoise:
    """Replace the region with deterministic noise in [-amplitude, +amplitude]."""

    seed: int = 0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"noise amplitude must be >= 0, got {self.amplitude}")


SubstrateKind = LocalMean | Zero | Blur | UniformNoise


def parse_substrate(text: str) -> SubstrateKind:
    """Parse a CLI/config substrate name: local-mean, zero, blur:<sigma>,
    noise:<seed>:<amplitude>."""
    parts = text.split(":")
    name = parts[0]
    if name == "local-mean" and len(parts) == 1:
        return LocalMean()
    if name == "zero" and len(parts) == 1:
        return Zero()
    if name == "blur":
        if len(parts) == 1:
            return Blur()
        if len(parts) == 2:
            return Blur(sigma=float(parts[1]))
    if name == "noise" and len(parts) == 3:
        return UniformNoise(seed=int(parts[1]), amplitude=float(parts[2]))
    raise ValueError(f"unknown substrate spec {text!r}")


def substrate_name(kind: SubstrateKind) -> str:
    if isinstance(kind, LocalMean):
        return "local-mean"
    if isinstance(kind, Zero):
        return "zero"
    if isinstance(kind, Blur):
        return f"blur:{kind.sigma:g}"
    return f"noise:{kind.seed}:{kind.amplitude:g}"


# splitmix64 finalizer; gives one noise value per (seed, c, i, j) key.
def _hash_noise_unit(seed: int, shape: tuple[int, int, int]) -> np.ndarray:
    c, h, w = shape
    idx = np.arange(c * h * w, dtype=np.uint64).reshape(shape)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (idx + np.uint64(1)) * np.uint64(
            0x9E3779B97F4A7C15
        )
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return ((z >> np.uint64(11)).astype(np.float64)) * (2.0**-53)


def _blurred(values: np.ndarray, sigma: float) -> np.ndarray:
    radius = int(np.ceil(3.0 * sigma))
    out = np.empty_like(values)
    for c in range(values.shape[0]):
        out[c] = ndimage.gaussian_filter(
            values[c], sigma=sigma, mode="nearest", radius=radius
        )
    return out


def substrate_field(x: ImageTensor, kind: SubstrateKind) -> np.ndarray:
    """Whole-image replacement content for kinds that do not depend on the
    region (zero, blur, noise). Raises for the local mean."""
    if isinstance(kind, Zero):
        return np.zeros(x.shape, dtype=np.float32)
    if isinstance(kind, Blur):
        return _blurred(x.values, kind.sigma)
    if isinstance(kind, UniformNoise):
        unit = _hash_noise_unit(kind.seed, x.shape)
        return ((2.0 * unit - 1.0) * kind.amplitude).astype(np.float32)
    raise UnsupportedSubstrateError(
        "local-mean has no whole-image substrate field; it is defined per region"
    )


def region_perturber(x: ImageTensor, kind: SubstrateKind):
    """Callable mapping a region to the perturbed copy of `x`. Substrates
    that do not depend on the region are materialized once, so calling
    this repeatedly (as the saliency methods do) stays cheap."""
    replacement = None if isinstance(kind, LocalMean) else substrate_field(x, kind)

    def apply(region: RectRegion) -> ImageTensor:
        region.check_within(x.height, x.width)
        out = x.values.copy()
        block = (slice(None), region.rows, region.cols)
        if replacement is None:
            # Per-channel mean; channels are not commensurable with one another.
            means = out[block].mean(axis=(1, 2), dtype=np.float64)
            out[block] = means[:, None, None].astype(np.float32)
        else:
            out[block] = replacement[block]
        return ImageTensor._wrap(out)

    return apply


def perturb(x: ImageTensor, region: RectRegion, kind: SubstrateKind) -> ImageTensor:
    """Replace `region` of `x` with the substrate; all other pixels are
    bit-identical to the input."""
    return region_perturber(x, kind)(region)


def perturb_full_mask(
    x: ImageTensor, keep_mask: ScalarField2D, kind: SubstrateKind
) -> ImageTensor:
    """Convex blend of input and substrate over the whole image:
    out = keep*x + (1-keep)*substrate, per channel."""
    if keep_mask.shape != (x.height, x.width):
        raise DimensionError(
            f"keep mask {keep_mask.height}x{keep_mask.width} does not match "
            f"input {x.height}x{x.width}"
        )
    if isinstance(kind, LocalMean):
        raise UnsupportedSubstrateError(
            "local-mean is undefined for scattered masks; use zero, blur or noise"
        )
    if keep_mask.values.min() < 0.0 or keep_mask.values.max() > 1.0:
        raise ValueError("keep mask values must lie in [0, 1]")
    k = keep_mask.values[None, :, :]
    sub = substrate_field(x, kind)
    out = (k * x.values + (1.0 - k) * sub).astype(np.float32)
    return ImageTensor._wrap(out)
