"""
Temporal perturbations as index maps
====================================

Temporal kinds never change pixel values. Each one is a list of source frame
indices, which is cheap to store and replays the perturbed clip exactly.
"""

# %%
from vidshift import PerturbationSpec, SeedContext, apply, index_map_for
from vidshift import temporal as tp

from _synthetic import moving_blobs

clip = moving_blobs("blobs-1", T=24, h=32, w=32)
ctx = SeedContext(7)

# %%
# One map per temporal kind at severity 2.
for kind in ("sampling", "reversal", "jumbling", "box_jumbling", "freezing"):
    imap = index_map_for(PerturbationSpec.of(kind, 2), clip, ctx)
    print(f"{kind:13s}", imap.indices)

# %%
# Maps round-trip through a one-line-per-map text file.
import tempfile
from pathlib import Path

spec = PerturbationSpec.of("jumbling", 4)
imap = index_map_for(spec, clip, ctx)
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "maps.txt"
    tp.write_index_maps(path, [tp.IndexMapRecord(clip.id, spec.kind, spec.severity, imap)])
    print(path.read_text().strip()[:80], "...")
    (record,) = tp.read_index_maps(path)

replayed = tp.apply_index_map(clip, record.index_map)
print("byte-identical:", replayed.frames.tobytes() == apply(spec, clip, ctx).frames.tobytes())
