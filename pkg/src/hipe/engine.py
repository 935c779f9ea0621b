"""Hierarchical perturbation saliency engine.

The algorithm perturbs coarse, overlapping regions of the input first,
credits each region with the drop in oracle score its perturbation
causes, then doubles the grid resolution and repeats on the regions
whose accumulated salience clears a threshold derived from the map
itself. Candidate regions at grid resolution d are all overlapping 2x2
cell blocks of a d x d lattice over the image; the lattice cell size is
floor(pixels/d) per axis, with the last cell row/column absorbing the
remainder so footprints always tile the full image.

Per level, thresholding and mask enumeration run against a snapshot of
the map as it stood when the level began, and all of the level's
contributions are applied in ascending (anchor-row, anchor-col) order,
so results are independent of scoring batch boundaries.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .arrays import ImageTensor, RectRegion, ScalarField2D
from .errors import InputTooSmallError
from .oracles import ScoringOracle
from .substrates import LocalMean, SubstrateKind, region_perturber

__all__ = [
    "ThresholdMode",
    "MaskGrid",
    "HiPeConfig",
    "LevelRecord",
    "HiPeRun",
    "initial_grid_resolution",
    "threshold_value",
    "enumerate_masks",
    "candidate_masks",
    "hipe",
]

log = logging.getLogger("hipe")

MIN_INPUT_SIDE = 8


class ThresholdMode(enum.Enum):
    MID_RANGE = "mid-range"
    MEAN = "mean"


def initial_grid_resolution(height: int, width: int) -> int:
    """Starting lattice resolution: ceil(log2(min(height, width))).

    Rounding up keeps the lattice evenly divisible by two across levels,
    so perturbation regions overlap evenly.
    """
    side = min(height, width)
    if side < MIN_INPUT_SIDE:
        raise InputTooSmallError(
            f"inputs must be at least {MIN_INPUT_SIDE}px on each side, got {height}x{width}"
        )
    return (side - 1).bit_length()


def _cell_edges(n_pixels: int, d: int) -> np.ndarray:
    """Pixel boundaries of the d lattice cells along one axis; the last
    cell absorbs the remainder when d does not divide n_pixels."""
    size = n_pixels // d
    edges = np.arange(d + 1, dtype=np.int64) * size
    edges[d] = n_pixels
    return edges


@dataclass(frozen=True)
class MaskGrid:
    """One candidate perturbation mask: a 2x2 block of active cells on a
    d x d lattice, addressed by its top-left cell."""

    d: int
    anchor: tuple[int, int]

    def __post_init__(self):
        i, j = self.anchor
        if not (0 <= i <= self.d - 2 and 0 <= j <= self.d - 2):
            raise ValueError(f"anchor {self.anchor} does not fit a 2x2 block on a {self.d}-grid")

    def footprint(self, height: int, width: int) -> RectRegion:
        """Pixel rectangle the active cells cover (nearest-neighbor upsampling)."""
        i, j = self.anchor
        rows = _cell_edges(height, self.d)
        cols = _cell_edges(width, self.d)
        return RectRegion(
            top=int(rows[i]),
            left=int(cols[j]),
            height=int(rows[i + 2] - rows[i]),
            width=int(cols[j + 2] - cols[j]),
        )


def threshold_value(s: ScalarField2D, mode: ThresholdMode = ThresholdMode.MID_RANGE) -> float:
    """Salience threshold from the current map: mid-range (outlier-chasing,
    the default) or arithmetic mean."""
    values = s.values
    if mode is ThresholdMode.MEAN:
        return float(values.mean(dtype=np.float64))
    vmin = float(values.min())
    vmax = float(values.max())
    return vmin + (vmax - vmin) / 2.0


def candidate_masks(d: int) -> list[MaskGrid]:
    """All (d-1)^2 anchors, ascending (row, col)."""
    if d < 2:
        raise ValueError(f"grid resolution must be at least 2, got {d}")
    return [MaskGrid(d, (i, j)) for i in range(d - 1) for j in range(d - 1)]


def enumerate_masks(
    d: int, s: ScalarField2D, mode: ThresholdMode = ThresholdMode.MID_RANGE
) -> list[MaskGrid]:
    """Candidate masks whose pixel footprint contains a map value at or
    above the threshold, in ascending (anchor-row, anchor-col) order.

    Over an all-zero map the threshold is zero and every candidate passes.
    """
    if d < 2:
        raise ValueError(f"grid resolution must be at least 2, got {d}")
    height, width = s.shape
    thr = threshold_value(s, mode)
    rows = _cell_edges(height, d)
    cols = _cell_edges(width, d)
    cell_max = np.maximum.reduceat(s.values, rows[:-1], axis=0)
    cell_max = np.maximum.reduceat(cell_max, cols[:-1], axis=1)
    block_max = np.maximum(
        np.maximum(cell_max[:-1, :-1], cell_max[1:, :-1]),
        np.maximum(cell_max[:-1, 1:], cell_max[1:, 1:]),
    )
    keep = np.argwhere(block_max >= thr)
    return [MaskGrid(d, (int(i), int(j))) for i, j in keep]


@dataclass(frozen=True)
class HiPeConfig:
    substrate: SubstrateKind = LocalMean()
    threshold_mode: ThresholdMode = ThresholdMode.MID_RANGE
    signed_mode: bool = False  # False applies ReLU: only confidence drops count
    batch_size: int = 32
    prune: bool = True  # False scores every candidate (upper-bound runs)
    record_deltas: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")


@dataclass(frozen=True)
class LevelRecord:
    d: int
    masks_enumerated: int
    masks_passed: int
    calls: int
    anchors: tuple[tuple[int, int], ...] | None = None
    deltas: tuple[float, ...] | None = None


@dataclass(frozen=True)
class HiPeRun:
    saliency: ScalarField2D
    oracle_calls: int
    levels: list[LevelRecord] = field(default_factory=list)
    base_score: float = 0.0


def hipe(x: ImageTensor, oracle: ScoringOracle, cfg: HiPeConfig = HiPeConfig()) -> HiPeRun:
    """Run hierarchical perturbation on one input and return the
    accumulated (un-normalized) saliency map with per-level accounting.

    The base score is taken once; every level then scores one perturbed
    input per passing mask in batches of cfg.batch_size. Resolution
    doubles after each level and the run stops when the next resolution
    would exceed min(h, w)/4, no candidate passes the threshold, or a
    completed level left the map all-zero (nothing to refine).
    """
    height, width = x.height, x.width
    d = initial_grid_resolution(height, width)
    min_side = min(height, width)
    perturbed = region_perturber(x, cfg.substrate)

    base = oracle.score_batch([x])[0]
    s = np.zeros((height, width), dtype=np.float32)
    levels: list[LevelRecord] = []

    while True:
        snapshot = ScalarField2D._wrap(s.copy())
        if cfg.prune:
            masks = enumerate_masks(d, snapshot, cfg.threshold_mode)
        else:
            masks = candidate_masks(d)
        if not masks:
            break

        footprints = [m.footprint(height, width) for m in masks]
        scores: list[float] = []
        for start in range(0, len(footprints), cfg.batch_size):
            chunk = footprints[start : start + cfg.batch_size]
            scores.extend(oracle.score_batch([perturbed(r) for r in chunk]))

        deltas = [base - sc for sc in scores]
        if not cfg.signed_mode:
            deltas = [dl if dl > 0.0 else 0.0 for dl in deltas]
        for region, delta in zip(footprints, deltas):
            s[region.rows, region.cols] += delta

        levels.append(
            LevelRecord(
                d=d,
                masks_enumerated=(d - 1) ** 2,
                masks_passed=len(masks),
                calls=len(masks),
                anchors=tuple(m.anchor for m in masks) if cfg.record_deltas else None,
                deltas=tuple(deltas) if cfg.record_deltas else None,
            )
        )
        log.debug(
            "level d=%d: %d/%d masks scored, base=%g", d, len(masks), (d - 1) ** 2, base
        )

        if cfg.prune and not s.any():
            break  # a zero map carries no signal worth refining
        d *= 2
        if 4 * d > min_side:
            break

    total_calls = 1 + sum(rec.calls for rec in levels)
    return HiPeRun(
        saliency=ScalarField2D._wrap(s),
        oracle_calls=total_calls,
        levels=levels,
        base_score=base,
    )
