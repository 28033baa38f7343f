"""
Compression artifacts
=====================

JPEG is applied frame by frame in-process. MPEG1 and MPEG2 go through an
ffmpeg subprocess; the script skips that part when no encoder is found.
"""

# %%
import numpy as np

from vidshift import codec
from vidshift.ladders import DEFAULT

from _synthetic import moving_blobs

clip = moving_blobs("blobs-2", T=16, h=224, w=224, texture=0.08)
frame = clip.frames[0]

# %%
# Encoded size falls as the quality ladder falls.
for s, q in enumerate(DEFAULT.values("jpeg", "quality"), start=1):
    data = codec.jpeg_encode(frame, q)
    back = codec.jpeg_decode(data)
    print(f"severity {s}: quality {q:3d}  {len(data):6d} bytes  psnr {codec.psnr(frame, back):5.2f} dB")

# %%
# MPEG at the bitrate ladder, as a fraction of a nominal 0.5 bits per pixel.
if codec.encoder_available():
    for standard in ("mpeg1", "mpeg2"):
        for s, frac in enumerate(DEFAULT.values(standard, "bitrate_fraction"), start=1):
            res = codec.mpeg_roundtrip(clip, standard, frac)
            p = np.mean([codec.psnr(a, b) for a, b in zip(clip.frames, res.clip.frames)])
            print(f"{standard} severity {s}: {codec.target_bitrate(224, 224, frac):8d} b/s  "
                  f"{len(res.encoded):7d} bytes  psnr {p:5.2f} dB")
else:
    print("no ffmpeg found; set VIDSHIFT_ENCODER or install the 'ffmpeg' extra")
