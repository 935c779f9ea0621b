"""Perturbation baselines to benchmark the hierarchical engine against:
randomized low-resolution masking (RISE-style) and fixed-kernel sliding
occlusion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arrays import ImageTensor, RectRegion, ScalarField2D
from .errors import DimensionError
from .oracles import ScoringOracle
from .substrates import SubstrateKind, Zero, region_perturber

__all__ = ["RiseConfig", "OcclusionConfig", "rise", "occlusion"]

_CHUNK = 64  # internal scoring chunk; results do not depend on it


@dataclass(frozen=True)
class RiseConfig:
    n_masks: int = 8000
    grid: int = 7  # low-res mask side length, in cells
    keep_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n_masks < 1:
            raise ValueError(f"n_masks must be >= 1, got {self.n_masks}")
        if self.grid < 2:
            raise ValueError(f"grid must be >= 2, got {self.grid}")
        if not 0.0 < self.keep_prob < 1.0:
            raise ValueError(f"keep_prob must lie strictly in (0, 1), got {self.keep_prob}")


def _interp_matrix(grid: int, out_len: int) -> np.ndarray:
    """out_len x grid row-stochastic bilinear interpolation weights,
    half-pixel-centered mapping with clamped borders."""
    p = np.arange(out_len, dtype=np.float64)
    coord = (p + 0.5) * grid / out_len - 0.5
    coord = np.clip(coord, 0.0, grid - 1.0)
    i0 = np.floor(coord).astype(np.int64)
    i0 = np.minimum(i0, grid - 2) if grid > 1 else i0
    frac = coord - i0
    weights = np.zeros((out_len, grid), dtype=np.float64)
    weights[np.arange(out_len), i0] = 1.0 - frac
    weights[np.arange(out_len), i0 + 1] = frac
    return weights


def rise(x: ImageTensor, oracle: ScoringOracle, cfg: RiseConfig) -> tuple[ScalarField2D, int]:
    """Random-mask saliency: sample low-res binary grids, upsample them
    bilinearly with a random sub-cell shift, dim the input with each mask
    (zero substrate), and average the masks weighted by the scores of the
    masked inputs. Deterministic for a fixed seed; the map is divided by
    n_masks * keep_prob at the end."""
    h, w = x.height, x.width
    g = cfg.grid
    cell_h = -(-h // g)  # ceil
    cell_w = -(-w // g)
    up_h = (g + 1) * cell_h
    up_w = (g + 1) * cell_w
    a_rows = _interp_matrix(g, up_h)
    a_cols = _interp_matrix(g, up_w)

    rng = np.random.default_rng(cfg.seed)
    acc = np.zeros((h, w), dtype=np.float64)

    done = 0
    while done < cfg.n_masks:
        b = min(_CHUNK, cfg.n_masks - done)
        grids = (rng.random((b, g, g)) < cfg.keep_prob).astype(np.float64)
        dy = rng.integers(0, cell_h, size=b)
        dx = rng.integers(0, cell_w, size=b)
        up = a_rows @ grids @ a_cols.T  # (b, up_h, up_w)
        masks = np.empty((b, h, w), dtype=np.float32)
        for k in range(b):
            masks[k] = up[k, dy[k] : dy[k] + h, dx[k] : dx[k] + w]
        np.clip(masks, 0.0, 1.0, out=masks)

        # Dimming: identical to perturb_full_mask with the zero substrate.
        dimmed = masks[:, None, :, :] * x.values[None, :, :, :]
        tensors = [ImageTensor._wrap(dimmed[k]) for k in range(b)]
        scores = np.asarray(oracle.score_batch(tensors), dtype=np.float64)
        acc += np.einsum("b,bhw->hw", scores, masks.astype(np.float64))
        done += b

    acc /= cfg.n_masks * cfg.keep_prob
    return ScalarField2D(acc.astype(np.float32)), cfg.n_masks


@dataclass(frozen=True)
class OcclusionConfig:
    kernel: int
    stride: int
    substrate: SubstrateKind = Zero()

    def __post_init__(self):
        if not 1 <= self.stride <= self.kernel:
            raise ValueError(
                f"need 1 <= stride <= kernel, got stride={self.stride} kernel={self.kernel}"
            )


def _placement_starts(n_pixels: int, kernel: int, stride: int) -> list[int]:
    count = (n_pixels - kernel + stride - 1) // stride + 1
    return [i * stride for i in range(count)]


def occlusion(
    x: ImageTensor, oracle: ScoringOracle, cfg: OcclusionConfig
) -> tuple[ScalarField2D, int]:
    """Slide a fixed kernel over the input, credit each placement's
    footprint with the drop in score its perturbation causes, and sum
    overlapping placements. Placements at the right/bottom edge are
    clipped to the image."""
    h, w = x.height, x.width
    if cfg.kernel > min(h, w):
        raise DimensionError(f"kernel {cfg.kernel} exceeds min image side {min(h, w)}")
    perturbed = region_perturber(x, cfg.substrate)

    regions = [
        RectRegion(top, left, min(cfg.kernel, h - top), min(cfg.kernel, w - left))
        for top in _placement_starts(h, cfg.kernel, cfg.stride)
        for left in _placement_starts(w, cfg.kernel, cfg.stride)
    ]

    base = oracle.score_batch([x])[0]
    s = np.zeros((h, w), dtype=np.float32)
    for start in range(0, len(regions), _CHUNK):
        chunk = regions[start : start + _CHUNK]
        scores = oracle.score_batch([perturbed(r) for r in chunk])
        for region, score in zip(chunk, scores):
            delta = base - score
            if delta > 0.0:
                s[region.rows, region.cols] += delta

    return ScalarField2D._wrap(s), len(regions)
