"""Camera-motion perturbations: static rotation, random rotation, translation."""

from __future__ import annotations

import math

import numpy as np
from PIL import Image
from scipy import ndimage

from .core import Clip, check_frame
from .errors import FrameTooSmall
from .rng import Stream

CROP_SIZE = 224
RESIZE_SIZE = 256


def rotate_frame(frame: np.ndarray, theta: float) -> np.ndarray:
    """Rotate counter-clockwise by ``theta`` degrees about the frame centre.

    Multiples of 90 degrees are exact pixel permutations (180 always, 90/270
    on square frames). Everything else is bilinear with black fill.
    """
    check_frame(frame)
    h, w = frame.shape[:2]
    quarter = theta / 90.0
    if quarter == round(quarter):
        k = int(round(quarter)) % 4
        if k == 0:
            return frame.copy()
        if k == 2 or h == w:
            return np.ascontiguousarray(np.rot90(frame, k=k, axes=(0, 1)))

    a = math.radians(theta)
    ca, sa = math.cos(a), math.sin(a)
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    dx, dy = xx - cx, yy - cy
    # inverse map: output pixel pulls from the source rotated back by theta
    src_x = cx + ca * dx - sa * dy
    src_y = cy + sa * dx + ca * dy
    out = np.empty(frame.shape, dtype=np.float64)
    for c in range(3):
        out[..., c] = ndimage.map_coordinates(
            frame[..., c].astype(np.float64), [src_y, src_x], order=1, mode="constant", cval=0.0
        )
    return np.floor(np.clip(out, 0, 255) + 0.5).astype(np.uint8)


def static_rotation(clip: Clip, theta: float) -> Clip:
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    return clip.with_frames(np.stack([rotate_frame(f, theta) for f in clip.frames]))


def random_angles(bound: float, seeds) -> list[float]:
    return [Stream(s).uniform_range(-bound, bound) for s in seeds]


def random_rotation(clip: Clip, bound: float, frame_seeds) -> Clip:
    """Rotate frame ``t`` by an angle uniform in [-bound, bound] from ``frame_seeds[t]``."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    if bound == 0:
        return clip.with_frames(clip.frames.copy())
    angles = random_angles(bound, frame_seeds)
    return clip.with_frames(np.stack([rotate_frame(f, a) for f, a in zip(clip.frames, angles)]))


def resize_shorter_side(frame: np.ndarray, size: int) -> np.ndarray:
    """Bilinear resize so that the shorter side equals ``size``; no-op when it already does."""
    h, w = frame.shape[:2]
    if min(h, w) == size:
        return frame
    if h <= w:
        new_h, new_w = size, max(size, int(round(w * size / h)))
    else:
        new_h, new_w = max(size, int(round(h * size / w))), size
    img = Image.fromarray(frame).resize((new_w, new_h), Image.BILINEAR)
    return np.asarray(img)


def center_square(frame: np.ndarray, size: int) -> np.ndarray:
    h, w = frame.shape[:2]
    top, left = (h - size) // 2, (w - size) // 2
    return frame[top : top + size, left : left + size]


def prepare_square(frame: np.ndarray, resize_size: int = RESIZE_SIZE) -> np.ndarray:
    return center_square(resize_shorter_side(frame, resize_size), resize_size)


def translation_offsets(jitter: int, seeds) -> list[tuple[int, int]]:
    """Per-frame integer (dy, dx) displacements uniform in [-jitter, jitter]^2."""
    out = []
    for s in seeds:
        dy, dx = Stream(s).integers(-jitter, jitter, (2,))
        out.append((int(dy), int(dx)))
    return out


def translation_crop(
    clip: Clip,
    jitter: int,
    frame_seeds,
    crop_size: int = CROP_SIZE,
    resize_size: int = RESIZE_SIZE,
) -> Clip:
    """Resize to a ``resize_size`` square, then crop ``crop_size`` around a jittered centre."""
    if crop_size > resize_size:
        raise ValueError("crop_size must not exceed resize_size")
    margin = (resize_size - crop_size) // 2
    if not 0 <= jitter <= margin:
        raise ValueError(f"jitter must be in [0, {margin}]")
    if min(clip.height, clip.width) < 1:
        raise FrameTooSmall("empty frames")
    offsets = translation_offsets(jitter, frame_seeds)
    out = []
    for frame, (dy, dx) in zip(clip.frames, offsets):
        square = prepare_square(frame, resize_size)
        if square.shape[0] < crop_size or square.shape[1] < crop_size:
            raise FrameTooSmall(f"frame {square.shape[:2]} smaller than crop {crop_size}")
        top, left = margin + dy, margin + dx
        out.append(square[top : top + crop_size, left : left + crop_size])
    return clip.with_frames(np.stack(out))
