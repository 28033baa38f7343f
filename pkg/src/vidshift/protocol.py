"""Evaluation protocol: uniform temporal crops and centre spatial crops."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .camera import resize_shorter_side
from .core import Clip, check_frame
from .errors import FrameTooSmall


@dataclass(frozen=True)
class ProtocolConfig:
    n_temporal_crops: int = 10
    clip_len: int = 8
    frame_stride: int = 8
    crop_size: int = 224
    resize_size: int = 256

    def __post_init__(self):
        if self.n_temporal_crops < 1 or self.clip_len < 1 or self.frame_stride < 1 or self.crop_size < 1:
            raise ValueError("protocol counts and sizes must be >= 1")

    @property
    def span(self) -> int:
        return (self.clip_len - 1) * self.frame_stride + 1

    def to_dict(self) -> dict:
        return asdict(self)


# (frames per clip, sampling stride) per model
MODEL_SAMPLING = {
    "r3d": (8, 8),
    "i3d": (8, 8),
    "slowfast": (32, 2),
    "x3d": (16, 5),
    "mvit": (16, 4),
    "timesformer": (8, 32),
}

PRESET_CROPS = {"kinetics10": 10, "ucf5": 5, "hmdb5": 5, "ssv2-1": 1}


def preset(name: str, model: str = "r3d") -> ProtocolConfig:
    if name not in PRESET_CROPS:
        raise ValueError(f"unknown protocol preset {name!r}; choose from {sorted(PRESET_CROPS)}")
    clip_len, stride = MODEL_SAMPLING[model.lower()]
    return ProtocolConfig(PRESET_CROPS[name], clip_len, stride)


def temporal_crop_starts(T: int, n: int, clip_len: int, stride: int) -> list[int]:
    """Start frames of ``n`` uniformly spaced crops, endpoints included.

    ``start_i = round(i * max(T - span, 0) / max(n - 1, 1))`` with halves
    rounded up; a single crop is centred.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    span = (clip_len - 1) * stride + 1
    room = max(T - span, 0)
    if n == 1:
        return [max((T - span) // 2, 0)]
    return [int(math.floor(i * room / (n - 1) + 0.5)) for i in range(n)]


def crop_indices(T: int, start: int, clip_len: int, stride: int) -> list[int]:
    """Frame indices of one crop; reads past the end clamp to the last frame."""
    return [min(start + j * stride, T - 1) for j in range(clip_len)]


def center_crop(frame: np.ndarray, size: int = 224, resize: int | None = 256) -> np.ndarray:
    """Central ``size`` x ``size`` window.

    Frames whose shorter side is below ``size`` are first resized so that
    side equals ``resize``; with ``resize=None`` they raise FrameTooSmall.
    """
    check_frame(frame)
    h, w = frame.shape[:2]
    if min(h, w) < size:
        if resize is None or resize < size:
            raise FrameTooSmall(f"frame {h}x{w} is smaller than crop {size}")
        frame = resize_shorter_side(frame, resize)
        h, w = frame.shape[:2]
    top, left = (h - size) // 2, (w - size) // 2
    return frame[top : top + size, left : left + size]


def clip_views(clip: Clip, config: ProtocolConfig) -> list[np.ndarray]:
    """Model-ready views: one (clip_len, crop, crop, 3) array per temporal crop."""
    views = []
    for start in temporal_crop_starts(clip.T, config.n_temporal_crops, config.clip_len, config.frame_stride):
        idx = crop_indices(clip.T, start, config.clip_len, config.frame_stride)
        views.append(
            np.stack([center_crop(clip.frames[i], config.crop_size, config.resize_size) for i in idx])
        )
    return views
