"""
Insertion and deletion curves
=============================

A faithful saliency map should let the score collapse quickly when the
most salient pixels are deleted (low AUC) and recover quickly when they
are revealed over a blurred input (high AUC). A random map does neither.
"""

from pathlib import Path

import numpy as np

from hipe import (
    ImageTensor,
    ScalarField2D,
    WeightedSumProxy,
    deletion_curve,
    insertion_curve,
)

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

rng = np.random.default_rng(0)
w = np.zeros((64, 64), dtype=np.float32)
w[20:32, 36:48] = 1.0
x = ImageTensor((w + 0.02 * rng.random((64, 64)).astype(np.float32))[None])
oracle = WeightedSumProxy(ScalarField2D(w))

faithful = ScalarField2D(w)  # the ground truth itself, the best possible map
random_map = ScalarField2D(rng.random((64, 64)).astype(np.float32))

for name, saliency in [("faithful", faithful), ("random", random_map)]:
    ins = insertion_curve(x, saliency, oracle, step_frac=0.02)
    dele = deletion_curve(x, saliency, oracle, step_frac=0.02)
    ins.write_csv(out_dir / f"insertion_{name}.csv")
    dele.write_csv(out_dir / f"deletion_{name}.csv")
    print(
        f"{name:<9} insertion auc={ins.auc:8.2f} (normalized {ins.normalized().auc:.3f})   "
        f"deletion auc={dele.auc:8.2f} (normalized {dele.normalized().auc:.3f})"
    )

print(f"\ncurves written to {out_dir}/insertion_*.csv and deletion_*.csv")
print("faithful maps: insertion AUC near 1, deletion AUC near 0; random maps sit near 0.5")
