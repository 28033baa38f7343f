import numpy as np
import pytest

from vidshift import codec
from vidshift.core import Clip
from vidshift.errors import EncoderFailure, EncoderNotFound
from vidshift.ladders import DEFAULT

from conftest import make_clip, make_natural_frame

needs_encoder = pytest.mark.skipif(not codec.encoder_available(), reason="no ffmpeg encoder available")


def gradient(h=64, w=96):
    yy, xx = np.mgrid[0:h, 0:w]
    return np.stack([xx * 255 // (w - 1), yy * 255 // (h - 1), (xx + yy) * 255 // (w + h - 2)], -1).astype(np.uint8)


def mean_psnr(a: Clip, b: Clip) -> float:
    return float(np.mean([codec.psnr(x, y) for x, y in zip(a.frames, b.frames)]))


def test_jpeg_high_quality_psnr():
    f = gradient()
    assert codec.psnr(f, codec.jpeg_roundtrip(f, 100)) > 40


def test_jpeg_size_non_increasing_over_ladder():
    f = make_natural_frame()
    sizes = [len(codec.jpeg_encode(f, q)) for q in DEFAULT.values("jpeg", "quality")]
    assert all(a >= b for a, b in zip(sizes, sizes[1:]))


@pytest.mark.parametrize("shape", [(1, 1), (17, 33), (64, 64)])
def test_jpeg_preserves_shape(shape):
    f = make_natural_frame(*shape) if min(shape) > 1 else np.zeros(shape + (3,), np.uint8)
    assert codec.jpeg_roundtrip(f, 50).shape == f.shape


def test_jpeg_bitwise_reproducible():
    f = make_natural_frame(64, 64)
    assert codec.jpeg_roundtrip(f, 15).tobytes() == codec.jpeg_roundtrip(f, 15).tobytes()


def test_jpeg_rejects_bad_quality():
    with pytest.raises(ValueError):
        codec.jpeg_roundtrip(gradient(), 0)


def test_target_bitrate():
    # 0.5 bit/pixel/frame at 25 fps
    assert codec.target_bitrate(224, 224, 1.0) == 627200
    assert codec.target_bitrate(224, 224, 0.5) == 313600


def test_missing_encoder(monkeypatch):
    monkeypatch.setenv(codec.ENCODER_ENV, "/nonexistent/ffmpeg-xyz")
    with pytest.raises(EncoderNotFound):
        codec.mpeg_roundtrip(make_clip(T=2, h=16, w=16), "mpeg1", 0.5)


def test_failing_encoder_reports_stderr(tmp_path, monkeypatch):
    fake = tmp_path / "fake-ffmpeg"
    fake.write_text("#!/bin/sh\necho boom >&2\nexit 3\n")
    fake.chmod(0o755)
    monkeypatch.setenv(codec.ENCODER_ENV, str(fake))
    with pytest.raises(EncoderFailure) as err:
        codec.mpeg_roundtrip(make_clip(T=2, h=16, w=16), "mpeg2", 0.5)
    assert "boom" in err.value.stderr


@needs_encoder
@pytest.mark.parametrize("standard", ["mpeg1", "mpeg2"])
def test_mpeg_static_clip_quality(standard):
    clip = Clip("s", np.repeat(gradient(64, 96)[None], 8, axis=0))
    out = codec.mpeg_roundtrip(clip, standard, 1.0).clip
    assert out.frames.shape == clip.frames.shape
    assert mean_psnr(clip, out) > 35


@needs_encoder
@pytest.mark.parametrize("standard", ["mpeg1", "mpeg2"])
def test_mpeg_ladder_psnr_non_increasing(standard):
    clip = make_clip(T=16, h=96, w=96)
    values = [mean_psnr(clip, codec.mpeg_roundtrip(clip, standard, f).clip)
              for f in DEFAULT.values(standard, "bitrate_fraction")]
    assert all(b <= a + 0.2 for a, b in zip(values, values[1:])), values


@needs_encoder
def test_mpeg_records_argv():
    result = codec.mpeg_roundtrip(make_clip(T=3, h=32, w=48), "mpeg1", 0.3)
    enc, dec = result.argv
    assert "-b:v" in enc and enc[enc.index("-c:v") + 1] == "mpeg1video"
    assert enc[enc.index("-s") + 1] == "48x32" and enc[enc.index("-r") + 1] == "25"
    assert result.encoded[:4] == b"\x00\x00\x01\xb3"  # sequence header start code
