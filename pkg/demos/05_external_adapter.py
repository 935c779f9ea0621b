"""
Scoring through an external model process
=========================================

The engine never needs in-process access to the model: here it drives
the bundled Node adapter over stdio using the binary scoring protocol,
and the resulting map matches the in-process proxy run.

Requires the adapter build: (cd adapter && npm install && npm run build)
"""

import shutil
import sys
from pathlib import Path

import numpy as np

from hipe import HiPeConfig, ImageTensor, WeightedSumProxy, Zero, hipe
from hipe.oracles import ExternalProcessOracle

adapter = Path(__file__).parent.parent / "adapter" / "dist" / "main.js"
if shutil.which("node") is None or not adapter.exists():
    sys.exit("needs node and a built adapter (cd adapter && npm install && npm run build)")

w = np.zeros((64, 64), dtype=np.float32)
w[18:32, 30:44] = 1.0
x = ImageTensor(w[None])

command = ["node", str(adapter), "--transport", "stdio", "--model", "sum", "--shape", "1x64x64"]
with ExternalProcessOracle.launch(command) as oracle:
    print(f"handshake ok, server accepts shape {oracle.shape}")
    external = hipe(x, oracle, HiPeConfig(substrate=Zero()))

in_process = hipe(x, WeightedSumProxy.uniform(64, 64), HiPeConfig(substrate=Zero()))

diff = np.abs(external.saliency.values - in_process.saliency.values).max()
print(f"external run: {external.oracle_calls} oracle calls over the wire")
print(f"largest element difference vs in-process run: {diff:g}")
