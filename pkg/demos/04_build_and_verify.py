"""
Building a small benchmark
==========================

``build_benchmark`` perturbs every listed video with every selected spec and
records each output in a JSONL manifest. Re-running skips finished rows;
``verify_benchmark`` re-checks all outputs against their checksums.
"""

# %%
import tempfile
from pathlib import Path

import numpy as np

from vidshift import SeedContext
from vidshift import bench
from vidshift.core import select_specs

from _synthetic import moving_blobs

tmp = Path(tempfile.mkdtemp())
entries = []
for i in range(3):
    path = tmp / f"clip{i}.npy"
    np.save(path, moving_blobs(f"clip{i}", T=16, h=48, w=64, seed=i).frames)
    entries.append(bench.TestEntry(f"clip{i}", str(path), i))

# %%
# Noise and Temporal only, to keep the demo quick: 45 specs x 3 videos.
specs = select_specs(["Noise", "Temporal"])
summary = bench.build_benchmark(entries, SeedContext(0), tmp / "bench", specs, workers=2)
print(summary)

# %%
# A second run finds every row complete.
print(bench.build_benchmark(entries, SeedContext(0), tmp / "bench", specs))

# %%
# Damage one output and verify catches it.
victim = next(p for p in (tmp / "bench").rglob("frame_00000.png"))
victim.write_bytes(b"not a png")
for line in bench.verify_benchmark(tmp / "bench").lines():
    print(line)

# %%
# Dry runs plan the full 90-spec grid without touching pixels.
big = [bench.TestEntry(f"v{i}", f"videos/{i}.avi", 0) for i in range(1529)]
plan = bench.build_benchmark(big, SeedContext(0), tmp / "plan", dry_run=True)
print(len(plan.rows), "planned rows")
