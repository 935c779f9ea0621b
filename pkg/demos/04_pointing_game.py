"""
Class-specific maps and the pointing game
=========================================

A two-class proxy model cares about the left block for class 0 and the
right block for class 1. Maps generated per target class should point
at the matching block, and the pointing game scores exactly that.
"""

from pathlib import Path

import numpy as np

from hipe import (
    HiPeConfig,
    ImageTensor,
    MultiClassProxy,
    PointingTally,
    ScalarField2D,
    Zero,
    hipe,
    pointing_game,
    render_heatmap,
)

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

blocks = {0: (24, 8), 1: (24, 40)}  # top-left corners of two 16x16 blocks
fields = []
for target, (top, left) in blocks.items():
    w = np.zeros((64, 64), dtype=np.float32)
    w[top : top + 16, left : left + 16] = 1.0
    fields.append(ScalarField2D(w))

proxy = MultiClassProxy(fields)
x = ImageTensor(np.ones((1, 64, 64), dtype=np.float32))

tally = PointingTally()
for target, (top, left) in blocks.items():
    proxy.set_target(target)
    run = hipe(x, proxy, HiPeConfig(substrate=Zero()))
    render_heatmap(run.saliency, out_dir / f"class_{target}.png")
    for check_target, region in enumerate(fields):
        hit = pointing_game(run.saliency, region)
        if check_target == target:
            tally.record(hit)
        print(f"map for class {target} vs region of class {check_target}: {'hit' if hit else 'miss'}")

print(f"\npointing accuracy on matching regions: {tally.accuracy:.0%}")
print(f"per-class heatmaps written to {out_dir}/class_*.png")
