"""Reading and writing clips: PNG frame directories, .npy arrays, video files."""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from .core import Clip
from .errors import DecodeFailure

FRAME_PATTERN = "frame_{:05d}.png"
IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".ppm"}


def write_frames(directory, frames: np.ndarray) -> list[Path]:
    """Write frames as PNG into ``directory`` atomically (staged, then renamed)."""
    directory = Path(directory)
    directory.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{directory.name}.", dir=directory.parent))
    try:
        for i, frame in enumerate(frames):
            Image.fromarray(np.ascontiguousarray(frame)).save(staging / FRAME_PATTERN.format(i), format="PNG")
        if directory.exists():
            shutil.rmtree(directory)
        os.replace(staging, directory)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return sorted(directory.glob("frame_*.png"))


def read_frame_dir(directory) -> np.ndarray:
    directory = Path(directory)
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES)
    if not files:
        raise DecodeFailure(f"no image frames in {directory}")
    frames = []
    for p in files:
        try:
            with Image.open(p) as img:
                frames.append(np.asarray(img.convert("RGB")))
        except OSError as exc:
            raise DecodeFailure(f"cannot read {p}: {exc}") from exc
    if len({f.shape for f in frames}) != 1:
        raise DecodeFailure(f"frames in {directory} differ in size")
    return np.stack(frames)


def read_video(path, encoder: str | None = None) -> np.ndarray:
    """Decode a video container to frames through the external ffmpeg binary."""
    from .codec import find_encoder

    exe = find_encoder(encoder)
    with tempfile.TemporaryDirectory() as tmp:
        argv = [exe, "-hide_banner", "-loglevel", "error", "-i", str(path), "-vsync", "0",
                str(Path(tmp) / "f_%06d.png")]
        proc = subprocess.run(argv, capture_output=True, check=False)
        if proc.returncode != 0:
            raise DecodeFailure(f"cannot decode {path}: {proc.stderr.decode('utf-8', 'replace').strip()}")
        return read_frame_dir(tmp)


def read_clip(path, video_id: str | None = None, encoder: str | None = None) -> Clip:
    """Load a clip from a frame directory, a ``.npy`` array or a video file."""
    path = Path(path)
    vid = video_id if video_id is not None else path.stem
    if not path.exists():
        raise DecodeFailure(f"{path} does not exist")
    try:
        if path.is_dir():
            frames = read_frame_dir(path)
        elif path.suffix == ".npy":
            frames = np.load(path, allow_pickle=False)
        else:
            frames = read_video(path, encoder)
        return Clip(vid, frames)
    except (ValueError, OSError) as exc:
        raise DecodeFailure(f"cannot load {path}: {exc}") from exc
