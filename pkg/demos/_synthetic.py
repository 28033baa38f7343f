"""Synthetic clips shared by the demo scripts, so they run without a dataset."""

import numpy as np

from vidshift import Clip


def moving_blobs(video_id="demo", T=32, h=120, w=160, seed=0, texture=0.0):
    """Smooth background with a few bright discs drifting across the frame.

    ``texture`` adds fixed fine-grained detail that codecs have to spend bits on.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    base = np.stack([xx / w, yy / h, 0.5 + 0.25 * np.sin(xx / 11.0)], axis=-1)
    centers = rng.uniform([0, 0], [h, w], size=(4, 2))
    velocity = rng.normal(0, 2.0, size=(4, 2))
    grain = texture * rng.normal(0, 1, size=(h, w, 1))
    frames = np.empty((T, h, w, 3), dtype=np.uint8)
    for t in range(T):
        img = base + grain
        for (cy, cx), (vy, vx) in zip(centers, velocity):
            d2 = (yy - cy - vy * t) ** 2 + (xx - cx - vx * t) ** 2
            img += 0.6 * np.exp(-d2 / 120.0)[..., None]
        frames[t] = np.clip(img * 255 + 0.5, 0, 255).astype(np.uint8)
    return Clip(video_id, frames)
