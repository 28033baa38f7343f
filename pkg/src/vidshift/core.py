"""Domain types, perturbation catalogue, pixel conversion and seed derivation."""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedSpec

CATEGORIES: dict[str, tuple[str, ...]] = {
    "Noise": ("gaussian", "shot", "impulse", "speckle"),
    "Blur": ("defocus", "motion", "zoom"),
    "Digital": ("jpeg", "mpeg1", "mpeg2"),
    "Temporal": ("sampling", "reversal", "jumbling", "box_jumbling", "freezing"),
    "Camera": ("static_rotation", "random_rotation", "translation"),
}

KIND_TO_CATEGORY: dict[str, str] = {k: c for c, kinds in CATEGORIES.items() for k in kinds}
KINDS: tuple[str, ...] = tuple(KIND_TO_CATEGORY)
SEVERITIES: tuple[int, ...] = (1, 2, 3, 4, 5)

TEMPORAL_KINDS = frozenset(CATEGORIES["Temporal"])
MPEG_KINDS = frozenset({"mpeg1", "mpeg2"})


@dataclass(frozen=True, order=True)
class PerturbationSpec:
    category: str
    kind: str
    severity: int

    def __post_init__(self):
        if self.kind not in KIND_TO_CATEGORY:
            raise UnsupportedSpec(f"unknown perturbation kind {self.kind!r}")
        if KIND_TO_CATEGORY[self.kind] != self.category:
            raise UnsupportedSpec(
                f"kind {self.kind!r} belongs to {KIND_TO_CATEGORY[self.kind]}, not {self.category}"
            )
        if not isinstance(self.severity, (int, np.integer)) or not 1 <= self.severity <= 5:
            raise UnsupportedSpec(f"severity must be an integer in 1..5, got {self.severity!r}")

    @classmethod
    def of(cls, kind: str, severity: int) -> "PerturbationSpec":
        if kind not in KIND_TO_CATEGORY:
            raise UnsupportedSpec(f"unknown perturbation kind {kind!r}")
        return cls(KIND_TO_CATEGORY[kind], kind, int(severity))

    def __str__(self) -> str:
        return f"{self.category}/{self.kind}/{self.severity}"

    @classmethod
    def parse(cls, text: str) -> "PerturbationSpec":
        parts = text.strip().split("/")
        if len(parts) != 3:
            raise UnsupportedSpec(f"cannot parse perturbation spec {text!r}")
        try:
            severity = int(parts[2])
        except ValueError:
            raise UnsupportedSpec(f"bad severity in {text!r}") from None
        return cls(parts[0], parts[1], severity)


def enumerate_specs(category: str | None = None, kind: str | None = None) -> list[PerturbationSpec]:
    """All benchmark perturbations, optionally filtered by category or kind."""
    specs = [
        PerturbationSpec(cat, k, s)
        for cat, kinds in CATEGORIES.items()
        for k in kinds
        for s in SEVERITIES
    ]
    if category is not None:
        specs = [p for p in specs if p.category == category]
    if kind is not None:
        specs = [p for p in specs if p.kind == kind]
    return specs


def select_specs(only: list[str] | None) -> list[PerturbationSpec]:
    """Resolve filter tokens (category names, kind names or full spec strings)."""
    if not only:
        return enumerate_specs()
    lookup = {c.lower(): c for c in CATEGORIES}
    chosen: list[PerturbationSpec] = []
    for token in only:
        t = token.strip()
        if t.lower() in lookup:
            chosen += enumerate_specs(category=lookup[t.lower()])
        elif t in KIND_TO_CATEGORY:
            chosen += enumerate_specs(kind=t)
        elif "/" in t:
            chosen.append(PerturbationSpec.parse(t))
        else:
            raise UnsupportedSpec(f"unknown spec filter {token!r}")
    seen = set()
    return [p for p in chosen if not (p in seen or seen.add(p))]


def check_frame(frame: np.ndarray) -> np.ndarray:
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ValueError(f"frame must be HxWx3, got shape {frame.shape}")
    if frame.shape[0] < 1 or frame.shape[1] < 1:
        raise ValueError("frame must be at least 1x1")
    if frame.dtype != np.uint8:
        raise ValueError(f"frame must be uint8, got {frame.dtype}")
    return frame


@dataclass
class Clip:
    """A video clip: ``frames`` is a uint8 array of shape (T, H, W, 3)."""

    id: str
    frames: np.ndarray = field(repr=False)

    def __post_init__(self):
        frames = np.asarray(self.frames)
        if frames.ndim != 4 or frames.shape[-1] != 3:
            raise ValueError(f"clip frames must be (T, H, W, 3), got {frames.shape}")
        if frames.shape[0] < 1:
            raise ValueError("clip needs at least one frame")
        if frames.shape[1] < 1 or frames.shape[2] < 1:
            raise ValueError("clip frames must be at least 1x1")
        if frames.dtype != np.uint8:
            raise ValueError(f"clip frames must be uint8, got {frames.dtype}")
        self.frames = frames

    @property
    def T(self) -> int:
        return self.frames.shape[0]

    @property
    def height(self) -> int:
        return self.frames.shape[1]

    @property
    def width(self) -> int:
        return self.frames.shape[2]

    def with_frames(self, frames) -> "Clip":
        return Clip(self.id, np.ascontiguousarray(frames))


def to_float(frame: np.ndarray) -> np.ndarray:
    return frame.astype(np.float64) / 255.0


def to_uint8(x: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and round half away from zero onto the 8-bit grid."""
    v = np.clip(x, 0.0, 1.0) * 255.0
    return np.floor(v + 0.5).astype(np.uint8)


def pixel_checksum(frames: np.ndarray) -> str:
    """64-bit BLAKE2b of the raw pixel bytes, prefixed with the array shape."""
    frames = np.ascontiguousarray(frames, dtype=np.uint8)
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<" + "I" * frames.ndim, *frames.shape))
    h.update(frames.tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class SeedContext:
    master_seed: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")


def _field(data: bytes) -> bytes:
    return struct.pack("<I", len(data)) + data


def derive_seed(
    ctx: SeedContext,
    video_id: str,
    kind: str,
    severity: int,
    frame_idx: int | None = None,
) -> int:
    """Derive a 64-bit stream seed.

    The digest is keyed BLAKE2b (8-byte output) with the master seed as key.
    The message is the length-prefixed UTF-8 video id, the length-prefixed
    kind name, one severity byte and, when given, the frame index as a
    little-endian u32 (a marker byte distinguishes "no frame index").
    """
    key = struct.pack("<Q", int(ctx.master_seed))
    h = hashlib.blake2b(digest_size=8, key=key)
    h.update(_field(video_id.encode("utf-8")))
    h.update(_field(kind.encode("utf-8")))
    h.update(struct.pack("<B", int(severity)))
    if frame_idx is None:
        h.update(b"\x00")
    else:
        h.update(b"\x01" + struct.pack("<I", int(frame_idx)))
    return int.from_bytes(h.digest(), "little")
