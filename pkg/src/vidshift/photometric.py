"""Per-frame noise and blur perturbations.

All functions take and return uint8 HxWx3 frames. Internally pixels are
floats in [0, 1]; results are clamped and rounded half away from zero.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage

from .core import check_frame, to_float, to_uint8
from .rng import Stream


def gaussian_noise(frame: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    check_frame(frame)
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return frame.copy()
    x = to_float(frame)
    return to_uint8(x + sigma * Stream(seed).normal(x.shape))


def shot_noise(frame: np.ndarray, lam: float, seed: int) -> np.ndarray:
    """Poisson photon noise: ``Poisson(x * lam) / lam``."""
    check_frame(frame)
    if lam <= 0:
        raise ValueError("lam must be > 0")
    x = to_float(frame)
    counts = Stream(seed).poisson(x * lam)
    return to_uint8(counts / lam)


def impulse_noise(frame: np.ndarray, p: float, seed: int) -> np.ndarray:
    """Salt-and-pepper: whole pixels become black or white with probability ``p``."""
    check_frame(frame)
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    h, w, _ = frame.shape
    stream = Stream(seed)
    hit = stream.uniform((h, w)) < p
    white = stream.uniform((h, w)) < 0.5
    out = frame.copy()
    out[hit & white] = 255
    out[hit & ~white] = 0
    return out


def speckle_noise(frame: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    check_frame(frame)
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return frame.copy()
    x = to_float(frame)
    return to_uint8(x + x * sigma * Stream(seed).normal(x.shape))


def disk_kernel(radius: int) -> np.ndarray:
    """Normalized flat disk: all offsets with ``dx**2 + dy**2 <= radius**2``."""
    if radius < 1:
        raise ValueError("radius must be >= 1")
    r = int(radius)
    yy, xx = np.mgrid[-r : r + 1, -r : r + 1]
    k = (xx * xx + yy * yy <= r * r).astype(np.float64)
    return k / k.sum()


def motion_kernel(radius: int, sigma: float, angle: float) -> np.ndarray:
    """Gaussian-weighted line of half-length ``radius`` at ``angle`` degrees.

    Samples at integer distances ``-radius..radius`` along the line are
    splatted bilinearly onto the grid, so angle 0 stays on the centre row.
    Angles are measured counter-clockwise with rows growing downward.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    r = int(radius)
    size = 2 * r + 1
    k = np.zeros((size, size))
    a = math.radians(angle)
    ca, sa = math.cos(a), math.sin(a)
    # snap tiny float residue so axis-aligned kernels stay exactly axis-aligned
    ca = 0.0 if abs(ca) < 1e-12 else ca
    sa = 0.0 if abs(sa) < 1e-12 else sa
    for d in range(-r, r + 1):
        weight = math.exp(-(d * d) / (2.0 * sigma * sigma))
        x = r + d * ca
        y = r - d * sa
        x0, y0 = math.floor(x), math.floor(y)
        fx, fy = x - x0, y - y0
        for yi, wy in ((y0, 1 - fy), (y0 + 1, fy)):
            for xi, wx in ((x0, 1 - fx), (x0 + 1, fx)):
                if wx * wy > 0 and 0 <= yi < size and 0 <= xi < size:
                    k[yi, xi] += weight * wx * wy
    return k / k.sum()


def convolve_frame(frame: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Correlate each channel with ``kernel`` using edge replication; float in [0, 1]."""
    x = to_float(frame)
    return ndimage.correlate(x, kernel[:, :, None], mode="nearest")


def defocus_blur(frame: np.ndarray, radius: int) -> np.ndarray:
    check_frame(frame)
    return to_uint8(convolve_frame(frame, disk_kernel(radius)))


def motion_blur(frame: np.ndarray, radius: int, sigma: float, angle: float) -> np.ndarray:
    check_frame(frame)
    return to_uint8(convolve_frame(frame, motion_kernel(radius, sigma, angle)))


def motion_angle(seed: int) -> float:
    """Per-clip blur direction, uniform in [0, 180) degrees."""
    return Stream(seed).uniform() * 180.0


def zoom_factors(max_zoom: float, step: float) -> list[float]:
    if max_zoom <= 1:
        raise ValueError("max_zoom must be > 1")
    if not 0 < step < max_zoom - 1 + 1e-9:
        raise ValueError("step must be in (0, max_zoom - 1]")
    count = int(math.floor((max_zoom - 1) / step + 1e-9))
    return [1.0 + i * step for i in range(1, count + 1)]


def center_zoom(x: np.ndarray, factor: float) -> np.ndarray:
    """Bilinear zoom about the frame centre, keeping the frame size.

    Equivalent to cropping the central ``1/factor`` window and resizing it
    back up; output pixel ``i`` samples source position ``c + (i - c) / factor``.
    """
    h, w = x.shape[:2]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys = cy + (np.arange(h) - cy) / factor
    xs = cx + (np.arange(w) - cx) / factor
    y0 = np.clip(np.floor(ys).astype(int), 0, h - 1)
    x0 = np.clip(np.floor(xs).astype(int), 0, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - np.floor(ys))[:, None, None]
    fx = (xs - np.floor(xs))[None, :, None]
    top = x[y0][:, x0] * (1 - fx) + x[y0][:, x1] * fx
    bottom = x[y1][:, x0] * (1 - fx) + x[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy


def zoom_blur(frame: np.ndarray, max_zoom: float, step: float) -> np.ndarray:
    """Average of the frame and its centre zooms at ``1 + i * step <= max_zoom``."""
    check_frame(frame)
    x = to_float(frame)
    acc = x.copy()
    factors = zoom_factors(max_zoom, step)
    for z in factors:
        acc += center_zoom(x, z)
    return to_uint8(acc / (len(factors) + 1))
