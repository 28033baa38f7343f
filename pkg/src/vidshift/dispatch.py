"""Apply any benchmark perturbation to a clip."""

from __future__ import annotations

import numpy as np

from . import camera, codec, photometric, temporal
from .core import TEMPORAL_KINDS, Clip, PerturbationSpec, SeedContext, derive_seed
from .errors import UnsupportedSpec
from .ladders import DEFAULT, Ladder

_NOISE = {
    "gaussian": lambda f, p, s: photometric.gaussian_noise(f, p["sigma"], s),
    "shot": lambda f, p, s: photometric.shot_noise(f, p["lam"], s),
    "impulse": lambda f, p, s: photometric.impulse_noise(f, p["p"], s),
    "speckle": lambda f, p, s: photometric.speckle_noise(f, p["sigma"], s),
}


def frame_seeds(ctx: SeedContext, clip: Clip, spec: PerturbationSpec, consistent: bool = False) -> list[int]:
    if consistent:
        return [derive_seed(ctx, clip.id, spec.kind, spec.severity, 0)] * clip.T
    return [derive_seed(ctx, clip.id, spec.kind, spec.severity, t) for t in range(clip.T)]


def index_map_for(
    spec: PerturbationSpec, clip: Clip, ctx: SeedContext, ladder: Ladder = DEFAULT
) -> temporal.FrameIndexMap:
    if spec.kind not in TEMPORAL_KINDS:
        raise UnsupportedSpec(f"{spec.kind} is not temporal")
    params = ladder.params(spec.kind, spec.severity)
    seed = derive_seed(ctx, clip.id, spec.kind, spec.severity)
    return temporal.build_map(spec.kind, clip.T, params, seed)


def apply(
    spec: PerturbationSpec,
    clip: Clip,
    ctx: SeedContext,
    ladder: Ladder = DEFAULT,
    *,
    consistent_noise: bool = False,
    encoder: str | None = None,
    scratch_dir=None,
) -> Clip:
    """Perturb ``clip`` with ``spec``; the result depends only on the arguments.

    Noise is redrawn per frame unless ``consistent_noise`` is set, in which
    case every frame reuses the frame-0 seed. Translation returns 224x224
    frames; every other kind keeps the input frame size.
    """
    if not isinstance(spec, PerturbationSpec):
        raise UnsupportedSpec(f"expected a PerturbationSpec, got {spec!r}")
    kind = spec.kind
    params = ladder.params(kind, spec.severity)

    if kind in _NOISE:
        seeds = frame_seeds(ctx, clip, spec, consistent_noise)
        fn = _NOISE[kind]
        return clip.with_frames(np.stack([fn(f, params, s) for f, s in zip(clip.frames, seeds)]))
    if kind == "defocus":
        return _per_frame(clip, photometric.defocus_blur, int(params["radius"]))
    if kind == "motion":
        angle = photometric.motion_angle(derive_seed(ctx, clip.id, kind, spec.severity))
        return _per_frame(clip, photometric.motion_blur, int(params["radius"]), float(params["sigma"]), angle)
    if kind == "zoom":
        return _per_frame(clip, photometric.zoom_blur, float(params["max_zoom"]), float(params["step"]))
    if kind == "jpeg":
        return _per_frame(clip, codec.jpeg_roundtrip, int(params["quality"]))
    if kind in ("mpeg1", "mpeg2"):
        return codec.mpeg_roundtrip(
            clip, kind, float(params["bitrate_fraction"]), encoder=encoder, scratch_dir=scratch_dir
        ).clip
    if kind in TEMPORAL_KINDS:
        return temporal.apply_index_map(clip, index_map_for(spec, clip, ctx, ladder))
    if kind == "static_rotation":
        return camera.static_rotation(clip, float(params["theta"]))
    if kind == "random_rotation":
        return camera.random_rotation(clip, float(params["bound"]), frame_seeds(ctx, clip, spec))
    if kind == "translation":
        return camera.translation_crop(clip, int(params["jitter"]), frame_seeds(ctx, clip, spec))
    raise UnsupportedSpec(f"no implementation for {kind!r}")


def _per_frame(clip: Clip, fn, *args) -> Clip:
    return clip.with_frames(np.stack([fn(f, *args) for f in clip.frames]))
