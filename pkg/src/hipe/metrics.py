"""Causal evaluation of saliency maps: deletion and insertion curves with
their AUCs, the pointing game, and oracle-call efficiency accounting.

Deletion removes pixels in decreasing saliency order (zero substrate) and
watches the score fall; insertion starts from a blurred input and reveals
pixels in the same order, watching the score rise. Scores are taken from
the oracle as-is, so curves are score-scale dependent; normalized AUCs
min-max rescale each curve before integrating.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .arrays import ImageTensor, ScalarField2D
from .errors import DimensionError, InvalidAnnotationError
from .oracles import ScoringOracle
from .substrates import Blur, Zero, substrate_field

__all__ = [
    "MetricCurve",
    "PointingTally",
    "deletion_curve",
    "insertion_curve",
    "pointing_game",
    "EfficiencyRow",
    "efficiency_report",
    "format_efficiency_table",
]

_CHUNK = 32


@dataclass(frozen=True)
class MetricCurve:
    """Ordered (fraction perturbed, score) points with trapezoidal AUC."""

    points: tuple[tuple[float, float], ...]
    auc: float

    @classmethod
    def from_points(cls, points: Sequence[tuple[float, float]]) -> "MetricCurve":
        fractions = [p[0] for p in points]
        if len(points) < 2 or fractions[0] != 0.0 or fractions[-1] != 1.0:
            raise ValueError("curve must run from fraction 0.0 to 1.0")
        if any(b <= a for a, b in zip(fractions, fractions[1:])):
            raise ValueError("fractions must be strictly increasing")
        return cls(points=tuple((float(f), float(s)) for f, s in points), auc=_trapezoid(points))

    @property
    def fractions(self) -> list[float]:
        return [p[0] for p in self.points]

    @property
    def scores(self) -> list[float]:
        return [p[1] for p in self.points]

    def normalized(self) -> "MetricCurve":
        """Scores min-max rescaled to [0, 1]; a flat curve maps to zeros."""
        scores = np.array(self.scores, dtype=np.float64)
        lo, hi = scores.min(), scores.max()
        unit = np.zeros_like(scores) if hi == lo else (scores - lo) / (hi - lo)
        return MetricCurve.from_points(list(zip(self.fractions, unit.tolist())))

    def write_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["fraction", "score"])
            writer.writerows(self.points)


def _trapezoid(points: Sequence[tuple[float, float]]) -> float:
    total = 0.0
    for (f0, s0), (f1, s1) in zip(points, points[1:]):
        total += 0.5 * (s0 + s1) * (f1 - f0)
    return total


def _saliency_rank(map_values: np.ndarray) -> np.ndarray:
    """rank[i,j] = position of the pixel in descending-saliency order,
    ties broken by raster order."""
    flat = map_values.ravel()
    order = np.argsort(-flat, kind="stable")
    rank = np.empty(flat.size, dtype=np.int64)
    rank[order] = np.arange(flat.size)
    return rank.reshape(map_values.shape)


def _step_counts(n_pixels: int, step_frac: float) -> np.ndarray:
    if not 0.0 < step_frac <= 1.0:
        raise ValueError(f"step fraction must lie in (0, 1], got {step_frac}")
    n_steps = int(np.ceil(1.0 / step_frac))
    counts = np.rint(np.arange(n_steps + 1) * step_frac * n_pixels).astype(np.int64)
    counts = np.clip(counts, 0, n_pixels)
    counts[-1] = n_pixels
    return np.unique(counts)


def _score_progression(
    x: ImageTensor,
    saliency: ScalarField2D,
    oracle: ScoringOracle,
    step_frac: float,
    reveal: bool,
    background: np.ndarray,
) -> MetricCurve:
    if saliency.shape != (x.height, x.width):
        raise DimensionError(
            f"map {saliency.height}x{saliency.width} does not match "
            f"input {x.height}x{x.width}"
        )
    rank = _saliency_rank(saliency.values)
    counts = _step_counts(x.height * x.width, step_frac)
    n = float(x.height * x.width)

    scores: list[float] = []
    for start in range(0, len(counts), _CHUNK):
        chunk = counts[start : start + _CHUNK]
        tensors = []
        for count in chunk:
            touched = rank < count  # the `count` most salient pixels
            if reveal:
                keep = touched[None, :, :]
                out = np.where(keep, x.values, background).astype(np.float32)
            else:
                out = np.where(touched[None, :, :], background, x.values).astype(np.float32)
            tensors.append(ImageTensor._wrap(out))
        scores.extend(oracle.score_batch(tensors))

    points = [(count / n, score) for count, score in zip(counts, scores)]
    return MetricCurve.from_points(points)


def deletion_curve(
    x: ImageTensor,
    saliency: ScalarField2D,
    oracle: ScoringOracle,
    step_frac: float = 0.01,
) -> MetricCurve:
    """Replace pixels with zero in decreasing saliency order; a faithful
    map drives the score down quickly (low AUC is better)."""
    background = substrate_field(x, Zero())
    return _score_progression(x, saliency, oracle, step_frac, reveal=False, background=background)


def insertion_curve(
    x: ImageTensor,
    saliency: ScalarField2D,
    oracle: ScoringOracle,
    step_frac: float = 0.01,
    blur_sigma: float = 10.0,
) -> MetricCurve:
    """Reveal original pixels over a blurred input in decreasing saliency
    order; a faithful map drives the score up quickly (high AUC is better)."""
    background = substrate_field(x, Blur(sigma=blur_sigma))
    return _score_progression(x, saliency, oracle, step_frac, reveal=True, background=background)


def pointing_game(
    saliency: ScalarField2D,
    target_region: ScalarField2D,
    tolerance_px: int = 0,
) -> bool:
    """True when the map's argmax (raster-order tie break) lands inside the
    binary target region, dilated by a square ring of tolerance_px."""
    if target_region.shape != saliency.shape:
        raise DimensionError("target region dims do not match map dims")
    region = target_region.values > 0
    if not region.any():
        raise InvalidAnnotationError("target region is empty")
    flat_idx = int(np.argmax(saliency.values))
    i, j = divmod(flat_idx, saliency.width)
    t = int(tolerance_px)
    window = region[
        max(0, i - t) : i + t + 1,
        max(0, j - t) : j + t + 1,
    ]
    return bool(window.any())


@dataclass
class PointingTally:
    hits: int = 0
    misses: int = 0

    def record(self, hit: bool) -> None:
        if hit:
            self.hits += 1
        else:
            self.misses += 1

    @property
    def accuracy(self) -> float:
        total = self.hits + self.misses
        if total == 0:
            raise ValueError("no pointing-game outcomes recorded")
        return self.hits / total


@dataclass(frozen=True)
class EfficiencyRow:
    method: str
    calls: int
    wall_time: float
    call_ratio: float  # this method's calls over the reference method's


def efficiency_report(
    runs: Sequence[tuple[str, int, float]], reference: str = "hipe"
) -> list[EfficiencyRow]:
    """Per-method call/time table with call ratios against the reference
    method (falling back to the first row when absent)."""
    if len(runs) < 1:
        raise ValueError("need at least one run")
    for name, calls, _ in runs:
        if calls < 1:
            raise ValueError(f"run {name!r} reports zero oracle calls")
    by_name = {name.lower(): calls for name, calls, _ in runs}
    ref_calls = by_name.get(reference.lower(), runs[0][1])
    return [
        EfficiencyRow(method=name, calls=calls, wall_time=wall, call_ratio=calls / ref_calls)
        for name, calls, wall in runs
    ]


def format_efficiency_table(rows: Sequence[EfficiencyRow]) -> str:
    header = f"{'method':<12} {'calls':>8} {'time_s':>9} {'ratio':>7}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.method:<12} {r.calls:>8d} {r.wall_time:>9.3f} {r.call_ratio:>6.1f}x"
        )
    return "\n".join(lines)
