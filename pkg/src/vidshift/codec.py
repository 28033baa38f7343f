"""Compression round-trips: in-process JPEG, and MPEG-1/2 through an external encoder.

The encoder binary is ``$VIDSHIFT_ENCODER`` when set, else ``ffmpeg`` on
PATH, else the binary bundled with ``imageio-ffmpeg`` if that is installed.
"""

from __future__ import annotations

import io
import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .core import Clip, check_frame
from .errors import CodecFailure, EncoderFailure, EncoderNotFound, FrameCountMismatch

ENCODER_ENV = "VIDSHIFT_ENCODER"
FPS = 25
# reference rate for bitrate fractions: 0.5 bit per pixel per frame
REFERENCE_BITS_PER_PIXEL = 0.5

_FORMATS = {"mpeg1": ("mpeg1video", "m1v"), "mpeg2": ("mpeg2video", "m2v")}


def jpeg_encode(frame: np.ndarray, quality: int) -> bytes:
    check_frame(frame)
    if not 1 <= quality <= 100:
        raise ValueError("quality must be in [1, 100]")
    buf = io.BytesIO()
    try:
        Image.fromarray(frame).save(buf, format="JPEG", quality=int(quality), subsampling=2)
    except OSError as exc:
        raise CodecFailure(f"JPEG encode failed: {exc}") from exc
    return buf.getvalue()


def jpeg_decode(data: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as img:
            return np.asarray(img.convert("RGB"))
    except OSError as exc:
        raise CodecFailure(f"JPEG decode failed: {exc}") from exc


def jpeg_roundtrip(frame: np.ndarray, quality: int) -> np.ndarray:
    """Encode at ``quality`` with 4:2:0 chroma subsampling and decode back."""
    out = jpeg_decode(jpeg_encode(frame, quality))
    if out.shape != frame.shape:
        raise CodecFailure(f"JPEG round-trip changed shape {frame.shape} -> {out.shape}")
    return out


def find_encoder(explicit: str | None = None) -> str:
    candidate = explicit or os.environ.get(ENCODER_ENV)
    if candidate:
        resolved = shutil.which(candidate) or (candidate if Path(candidate).is_file() else None)
        if resolved is None:
            raise EncoderNotFound(f"encoder {candidate!r} not found")
        return resolved
    found = shutil.which("ffmpeg")
    if found:
        return found
    try:
        import imageio_ffmpeg
    except ImportError:
        raise EncoderNotFound(
            f"no ffmpeg on PATH; set {ENCODER_ENV} or install imageio-ffmpeg"
        ) from None
    return imageio_ffmpeg.get_ffmpeg_exe()


def encoder_available(explicit: str | None = None) -> bool:
    try:
        find_encoder(explicit)
    except EncoderNotFound:
        return False
    return True


def target_bitrate(width: int, height: int, bitrate_fraction: float) -> int:
    """Bits per second: ``fraction * 0.5 * W * H * fps``."""
    return max(1000, int(round(bitrate_fraction * REFERENCE_BITS_PER_PIXEL * width * height * FPS)))


@dataclass
class MpegResult:
    clip: Clip
    encoded: bytes
    argv: list[list[str]] = field(default_factory=list)


def mpeg_roundtrip(
    clip: Clip,
    standard: str,
    bitrate_fraction: float,
    encoder: str | None = None,
    scratch_dir=None,
) -> MpegResult:
    """Encode ``clip`` as an MPEG-1/2 elementary stream and decode it back.

    Returns the decoded clip, the encoded bytes and both argv lists (for the
    run manifest). Raises FrameCountMismatch if the decoder yields a
    different number of frames.
    """
    if standard not in _FORMATS:
        raise ValueError(f"standard must be one of {sorted(_FORMATS)}")
    if not 0 < bitrate_fraction <= 1:
        raise ValueError("bitrate_fraction must be in (0, 1]")
    exe = find_encoder(encoder)
    fmt, ext = _FORMATS[standard]
    T, h, w = clip.T, clip.height, clip.width
    bitrate = target_bitrate(w, h, bitrate_fraction)

    with tempfile.TemporaryDirectory(dir=scratch_dir) as tmp:
        encoded_path = Path(tmp) / f"clip.{ext}"
        enc_argv = [
            exe, "-hide_banner", "-loglevel", "error", "-y",
            "-f", "rawvideo", "-pix_fmt", "rgb24", "-s", f"{w}x{h}", "-r", str(FPS), "-i", "-",
            "-frames:v", str(T), "-threads", "1",
            "-c:v", fmt, "-b:v", str(bitrate), "-pix_fmt", "yuv420p",
            "-f", fmt, str(encoded_path),
        ]
        _run(enc_argv, np.ascontiguousarray(clip.frames).tobytes())
        dec_argv = [
            exe, "-hide_banner", "-loglevel", "error",
            "-i", str(encoded_path), "-threads", "1",
            "-f", "rawvideo", "-pix_fmt", "rgb24", "-s", f"{w}x{h}", "-",
        ]
        raw = _run(dec_argv, b"")
        encoded = encoded_path.read_bytes()

    frame_bytes = w * h * 3
    if len(raw) % frame_bytes:
        raise CodecFailure(f"decoder produced {len(raw)} bytes, not a multiple of {frame_bytes}")
    n = len(raw) // frame_bytes
    if n != T:
        raise FrameCountMismatch(f"decoded {n} frames, expected {T}")
    frames = np.frombuffer(raw, dtype=np.uint8).reshape(T, h, w, 3).copy()
    return MpegResult(clip.with_frames(frames), encoded, [enc_argv, dec_argv])


def _run(argv: list[str], stdin: bytes) -> bytes:
    try:
        proc = subprocess.run(argv, input=stdin, capture_output=True, check=False)
    except FileNotFoundError as exc:
        raise EncoderNotFound(str(exc)) from exc
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", "replace")
        raise EncoderFailure(f"{Path(argv[0]).name} exited with {proc.returncode}: {stderr.strip()}", stderr)
    return proc.stdout


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    if mse == 0:
        return float("inf")
    return 10.0 * np.log10(255.0 ** 2 / mse)
