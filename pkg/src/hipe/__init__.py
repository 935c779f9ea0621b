"""Saliency mapping for black-box scoring models.

The engine perturbs coarse overlapping regions of the input and refines
wherever accumulated salience clears a map-derived threshold, so oracle
calls concentrate on the regions that actually move the model's output.
Randomized-masking and sliding-occlusion baselines, insertion/deletion
causal metrics, a pointing-game harness, and oracle-call accounting
round out the toolkit.
"""

from .arrays import ImageTensor, RectRegion, ScalarField2D
from .baselines import OcclusionConfig, RiseConfig, occlusion, rise
from .engine import (
    HiPeConfig,
    HiPeRun,
    LevelRecord,
    MaskGrid,
    ThresholdMode,
    candidate_masks,
    enumerate_masks,
    hipe,
    initial_grid_resolution,
    threshold_value,
)
from .hfa import load_array, save_array
from .imaging import load_image, render_heatmap, save_image
from .metrics import (
    MetricCurve,
    PointingTally,
    deletion_curve,
    efficiency_report,
    insertion_curve,
    pointing_game,
)
from .oracles import (
    ExternalProcessOracle,
    MultiClassProxy,
    ScoringOracle,
    WeightedSumProxy,
    open_external,
)
from .substrates import (
    Blur,
    LocalMean,
    SubstrateKind,
    UniformNoise,
    Zero,
    parse_substrate,
    perturb,
    perturb_full_mask,
)

__version__ = "0.1.0"

__all__ = [
    "ImageTensor",
    "RectRegion",
    "ScalarField2D",
    "OcclusionConfig",
    "RiseConfig",
    "occlusion",
    "rise",
    "HiPeConfig",
    "HiPeRun",
    "LevelRecord",
    "MaskGrid",
    "ThresholdMode",
    "candidate_masks",
    "enumerate_masks",
    "hipe",
    "initial_grid_resolution",
    "threshold_value",
    "load_array",
    "save_array",
    "load_image",
    "render_heatmap",
    "save_image",
    "MetricCurve",
    "PointingTally",
    "deletion_curve",
    "efficiency_report",
    "insertion_curve",
    "pointing_game",
    "ExternalProcessOracle",
    "MultiClassProxy",
    "ScoringOracle",
    "WeightedSumProxy",
    "open_external",
    "Blur",
    "LocalMean",
    "SubstrateKind",
    "UniformNoise",
    "Zero",
    "parse_substrate",
    "perturb",
    "perturb_full_mask",
]
