"""Temporal perturbations expressed as frame index maps.

A map has one entry per output position naming the source frame to copy.
Maps are cheap to store, so benchmarks persist them instead of pixels.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Clip
from .errors import IndexOutOfRange, MalformedFile
from .rng import Stream

SEGMENT_SIZES = (4, 8, 16, 32, 64)


@dataclass(frozen=True)
class FrameIndexMap:
    indices: tuple[int, ...]

    @property
    def T(self) -> int:
        return len(self.indices)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


def sampling_map(T: int, k: int) -> FrameIndexMap:
    """Skip-frame sampling, ``indices[j] = min(j * k, T - 1)``."""
    if T < 1 or k < 1:
        raise ValueError("T and k must be >= 1")
    return FrameIndexMap([min(j * k, T - 1) for j in range(T)])


def reversal_map(T: int, k: int) -> FrameIndexMap:
    return FrameIndexMap(sampling_map(T, k).indices[::-1])


def _segments(T: int, m: int):
    return [(start, min(start + m, T)) for start in range(0, T, m)]


def jumbling_map(T: int, m: int, seed: int) -> FrameIndexMap:
    """Shuffle frames inside consecutive segments of length ``m``."""
    if T < 1 or m < 1:
        raise ValueError("T and m must be >= 1")
    stream = Stream(seed)
    out = []
    for start, stop in _segments(T, m):
        out.extend(start + int(i) for i in stream.permutation(stop - start))
    return FrameIndexMap(out)


def box_jumbling_map(T: int, m: int, seed: int) -> FrameIndexMap:
    """Shuffle the order of segments, keeping each segment's frames in order."""
    if T < 1 or m < 1:
        raise ValueError("T and m must be >= 1")
    segs = _segments(T, m)
    order = Stream(seed).permutation(len(segs))
    out = []
    for i in order:
        start, stop = segs[int(i)]
        out.extend(range(start, stop))
    return FrameIndexMap(out)


def freezing_map(T: int, p_f: float, seed: int) -> FrameIndexMap:
    """Each frame after the first repeats its predecessor when a uniform draw falls below ``p_f``."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if not 0 <= p_f <= 1:
        raise ValueError("p_f must be in [0, 1]")
    u = Stream(seed).uniform((max(T - 1, 0),))
    out = [0]
    for t in range(1, T):
        out.append(out[-1] if u[t - 1] < p_f else t)
    return FrameIndexMap(out)


def build_map(kind: str, T: int, params: dict, seed: int) -> FrameIndexMap:
    if kind == "sampling":
        return sampling_map(T, int(params["k"]))
    if kind == "reversal":
        return reversal_map(T, int(params["k"]))
    if kind == "jumbling":
        return jumbling_map(T, int(params["m"]), seed)
    if kind == "box_jumbling":
        return box_jumbling_map(T, int(params["m"]), seed)
    if kind == "freezing":
        return freezing_map(T, float(params["p_f"]), seed)
    raise ValueError(f"{kind!r} is not a temporal perturbation")


def apply_index_map(clip: Clip, index_map: FrameIndexMap) -> Clip:
    idx = index_map.as_array()
    if idx.size and (idx.min() < 0 or idx.max() >= clip.T):
        raise IndexOutOfRange(f"index map refers to frames outside [0, {clip.T})")
    return clip.with_frames(clip.frames[idx])


# -- persistence: "video_id kind severity T idx_0 ... idx_{T-1}" per line


@dataclass(frozen=True)
class IndexMapRecord:
    video_id: str
    kind: str
    severity: int
    index_map: FrameIndexMap

    def to_line(self) -> str:
        if any(c.isspace() for c in self.video_id):
            raise ValueError("video ids in index map files may not contain whitespace")
        idx = " ".join(str(i) for i in self.index_map.indices)
        return f"{self.video_id} {self.kind} {self.severity} {self.index_map.T} {idx}"

    @classmethod
    def from_line(cls, line: str) -> "IndexMapRecord":
        parts = line.split()
        if len(parts) < 4:
            raise MalformedFile(f"index map line too short: {line!r}")
        video_id, kind, severity, T = parts[0], parts[1], int(parts[2]), int(parts[3])
        indices = [int(v) for v in parts[4:]]
        if len(indices) != T:
            raise MalformedFile(f"index map for {video_id} declares T={T} but lists {len(indices)} indices")
        return cls(video_id, kind, severity, FrameIndexMap(indices))


def write_index_maps(path, records) -> None:
    Path(path).write_text("".join(r.to_line() + "\n" for r in records))


def read_index_maps(path) -> list[IndexMapRecord]:
    return [IndexMapRecord.from_line(line) for line in Path(path).read_text().splitlines() if line.strip()]
