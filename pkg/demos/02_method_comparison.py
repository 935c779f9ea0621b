"""
Comparing saliency methods on one input
=======================================

Run the hierarchical engine, randomized masking, and sliding occlusion
on the same hot-block input and compare oracle-call cost and wall time.
"""

import time
from pathlib import Path

import numpy as np

from hipe import (
    HiPeConfig,
    ImageTensor,
    OcclusionConfig,
    RiseConfig,
    ScalarField2D,
    WeightedSumProxy,
    Zero,
    efficiency_report,
    hipe,
    occlusion,
    render_heatmap,
    rise,
)
from hipe.metrics import format_efficiency_table

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

# Ground truth: a single 24x24 block matters, nothing else does.
side = 128
w = np.zeros((side, side), dtype=np.float32)
w[40:64, 70:94] = 1.0
x = ImageTensor(np.ones((1, side, side), dtype=np.float32))


def timed(name, fn):
    oracle = WeightedSumProxy(ScalarField2D(w))
    started = time.perf_counter()
    saliency = fn(oracle)
    elapsed = time.perf_counter() - started
    render_heatmap(saliency, out_dir / f"compare_{name}.png")
    return name, oracle.call_count, elapsed, saliency


runs = [
    timed("hipe", lambda o: hipe(x, o, HiPeConfig(substrate=Zero())).saliency),
    timed("rise", lambda o: rise(x, o, RiseConfig(n_masks=4000, seed=0))[0]),
    timed("occlusion", lambda o: occlusion(x, o, OcclusionConfig(kernel=16, stride=8))[0]),
]

print(format_efficiency_table(efficiency_report([(n, c, t) for n, c, t, _ in runs])))
print()
for name, _, _, saliency in runs:
    peak = np.unravel_index(np.argmax(saliency.values), (side, side))
    inside = 40 <= peak[0] < 64 and 70 <= peak[1] < 94
    print(f"{name:<10} peak={peak}  inside true block: {inside}")
print(f"\nheatmaps written to {out_dir}/compare_*.png")
