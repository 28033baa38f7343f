"""Acceptance criteria. Run with ``pytest tests/test_acceptance.py``; a per-criterion
PASS/FAIL summary is printed at the end of the session."""

import math
import random
import time
from collections import Counter

import numpy as np
import pytest

from vidshift import bench, camera, codec, metrics, photometric as ph, protocol, temporal as tp
from vidshift.core import MPEG_KINDS, Clip, SeedContext, derive_seed, enumerate_specs
from vidshift.dispatch import apply
from vidshift.ladders import DEFAULT

from conftest import constant_frame, make_clip, make_natural_frame

C1 = "1. spec-set exactness"
C2 = "2. benchmark-size arithmetic"
C3 = "3. metric formulas"
C4 = "4. published-score consistency oracle"
C5 = "5. temporal index-map algebra"
C6 = "6. noise statistics"
C7 = "7. blur invariants"
C8 = "8. geometry"
C9 = "9. codec monotonicity"
C10 = "10. end-to-end determinism"
C11 = "11. index-map round-trip"
C12 = "12. protocol"


class Timer:
    def __init__(self, budget):
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.budget, f"took {self.elapsed:.1f}s, budget {self.budget}s"


# 1 -----------------------------------------------------------------------------


@pytest.mark.criterion(C1)
def test_spec_set_exactness():
    with Timer(1):
        specs = enumerate_specs()
        assert len(specs) == 90 and len(set(specs)) == 90
        assert Counter(p.category for p in specs) == {
            "Noise": 20, "Blur": 15, "Digital": 15, "Temporal": 25, "Camera": 15
        }


# 2 -----------------------------------------------------------------------------


@pytest.mark.criterion(C2)
@pytest.mark.parametrize("n_videos,rows", [(1529, 137_610), (3782, 340_380)], ids=["HMDB51-P", "UCF101-P"])
def test_benchmark_size(tmp_path, n_videos, rows):
    entries = [bench.TestEntry(f"video{i:05d}", f"videos/{i}.avi", i % 51) for i in range(n_videos)]
    with Timer(10):
        summary = bench.build_benchmark(entries, SeedContext(0), tmp_path, dry_run=True)
        _, manifest_rows = bench.read_manifest(summary.manifest_path)
    assert len(summary.rows) == rows
    assert len(manifest_rows) == rows


@pytest.mark.criterion(C2)
def test_large_benchmark_counts_divisible():
    # Kinetics400-P and SSv2-P sizes are 90 x their test-set sizes
    assert 1_616_670 == 90 * 17_963
    assert 2_229_930 == 90 * 24_777


# 3 -----------------------------------------------------------------------------


@pytest.mark.criterion(C3)
def test_metric_formulas():
    with Timer(1):
        for a in np.linspace(0.5, 100, 200):
            assert metrics.gamma_abs(a, a) == 1.0
            assert metrics.gamma_rel(a, a) == 1.0
        grid = np.linspace(0, 100, 100)
        for a_c in grid[1:].tolist() + [100.0]:
            for a_ps in grid:
                assert abs(metrics.gamma_rel(a_c, a_ps) - a_ps / a_c) <= 1e-12


@pytest.mark.criterion(C3)
def test_aggregation_permutation_invariant():
    from vidshift.core import KINDS

    rng = random.Random(1)
    cells = [((k, s), rng.uniform(0, 90)) for k in KINDS for s in range(1, 6)]
    base = metrics.aggregate(metrics.AccuracyTable("m", 91.5, dict(cells)))
    with Timer(1):
        for _ in range(100):
            rng.shuffle(cells)
            kinds = list(KINDS)
            rng.shuffle(kinds)
            sevs = [1, 2, 3, 4, 5]
            rng.shuffle(sevs)
            s = metrics.aggregate(metrics.AccuracyTable("m", 91.5, dict(cells)), severities=sevs, kinds=kinds)
            assert s.overall_a == base.overall_a and s.overall_r == base.overall_r
            assert s.category_a == base.category_a and s.category_r == base.category_r
            assert s.kind_a == base.kind_a


# 4 -----------------------------------------------------------------------------

# Kinetics-400P robustness summary: (gamma_a, gamma_r) for Noise and Blur
PUBLISHED = {
    "R3D": {"Noise": (0.71, 0.61), "Blur": (0.78, 0.70)},
    "I3D": {"Noise": (0.72, 0.61), "Blur": (0.80, 0.72)},
    "SF": {"Noise": (0.64, 0.53), "Blur": (0.80, 0.73)},
    "X3D": {"Noise": (0.71, 0.62), "Blur": (0.81, 0.75)},
    "TF": {"Noise": (0.87, 0.84), "Blur": (0.84, 0.79)},
    "MViT": {"Noise": (0.93, 0.91), "Blur": (0.86, 0.82)},
}


@pytest.mark.criterion(C4)
@pytest.mark.parametrize("model", list(PUBLISHED))
def test_published_implied_clean_accuracy(model):
    implied = {}
    for cat, (ga, gr) in PUBLISHED[model].items():
        drop = 100 * (1 - ga)
        if drop < 5:
            continue
        implied[cat] = metrics.implied_clean_accuracy(ga, gr)
    print(f"{model}: implied clean accuracy " + ", ".join(f"{c}={v:.2f}" for c, v in implied.items()))
    if len(implied) < 2:
        pytest.skip("fewer than two categories with a drop of 5 points or more")
    values = list(implied.values())
    assert max(values) - min(values) <= 2.0


# 5 -----------------------------------------------------------------------------


@pytest.mark.criterion(C5)
def test_temporal_map_algebra():
    with Timer(5):
        for T in range(1, 65):
            for k in range(1, 7):
                s = tp.sampling_map(T, k).indices
                assert len(s) == T
                assert all(s[j] == min(j * k, T - 1) for j in range(T))
                assert all(a <= b for a, b in zip(s, s[1:]))
                assert tp.reversal_map(T, k).indices == s[::-1]
            for m in tp.SEGMENT_SIZES:
                for seed in range(3):
                    j = tp.jumbling_map(T, m, seed).indices
                    assert len(j) == T
                    for start in range(0, T, m):
                        seg = j[start : start + m]
                        assert sorted(seg) == list(range(start, min(start + m, T)))
                    b = tp.box_jumbling_map(T, m, seed).indices
                    assert len(b) == T and sorted(b) == list(range(T))
                    if m >= T:
                        assert b == tuple(range(T))
                    # segments stay contiguous and internally ordered
                    starts = [i for i in range(T) if i == 0 or b[i] != b[i - 1] + 1]
                    assert all(b[i] % m == 0 for i in starts)
                    assert len(starts) <= math.ceil(T / m)
            for p in (0.0, 0.1, 0.3, 0.5, 1.0):
                f = tp.freezing_map(T, p, T).indices
                assert f[0] == 0 and all(a <= b for a, b in zip(f, f[1:]))


# 6 -----------------------------------------------------------------------------

N_PIX = 224 * 224
SEEDS = range(20)


@pytest.mark.criterion(C6)
def test_impulse_fraction_band():
    x = constant_frame(128, 224, 224)
    with Timer(30):
        for p in DEFAULT.values("impulse", "p"):
            band = 4 * math.sqrt(p * (1 - p) / N_PIX)
            for seed in SEEDS:
                changed = np.any(ph.impulse_noise(x, p, seed) != x, axis=-1).mean()
                assert abs(changed - p) <= band, (p, seed, changed)


@pytest.mark.criterion(C6)
def test_gaussian_speckle_std():
    x = constant_frame(128, 224, 224)
    mid = 128 / 255
    with Timer(30):
        for seed in SEEDS:
            g = ph.gaussian_noise(x, 0.12, seed).astype(np.float64) / 255
            assert abs(g.std() / 0.12 - 1) <= 0.10
            s = ph.speckle_noise(x, 0.2, seed).astype(np.float64) / 255
            assert abs(s.std() / (0.2 * mid) - 1) <= 0.10


@pytest.mark.criterion(C6)
def test_shot_mean():
    x = constant_frame(128, 224, 224)
    mid = 128 / 255
    with Timer(30):
        for seed in SEEDS:
            out = ph.shot_noise(x, 25.0, seed).astype(np.float64) / 255
            assert abs(out.mean() / mid - 1) <= 0.02


# 7 -----------------------------------------------------------------------------


@pytest.mark.criterion(C7)
def test_blur_invariants():
    with Timer(5):
        for value in (0, 37, 128, 255):
            x = constant_frame(value, 48, 40)
            for s in range(1, 6):
                p = DEFAULT.params("defocus", s)
                assert np.array_equal(ph.defocus_blur(x, p["radius"]), x)
                p = DEFAULT.params("motion", s)
                assert np.array_equal(ph.motion_blur(x, p["radius"], p["sigma"], 17.0 * s), x)
                p = DEFAULT.params("zoom", s)
                assert np.array_equal(ph.zoom_blur(x, p["max_zoom"], p["step"]), x)
        for s in range(1, 6):
            r = DEFAULT.params("defocus", s)["radius"]
            assert abs(ph.disk_kernel(r).sum() - 1) <= 1e-9
            p = DEFAULT.params("motion", s)
            for angle in np.linspace(0, 180, 19):
                assert abs(ph.motion_kernel(p["radius"], p["sigma"], angle).sum() - 1) <= 1e-9
        for r in DEFAULT.values("defocus", "radius"):
            size = 2 * r + 11
            x = constant_frame(0, size, size)
            c = size // 2
            x[c, c] = 255
            resp = ph.defocus_blur(x, r)[..., 0].astype(np.float64)
            # analytic disk: 1/count inside x^2 + y^2 <= r^2
            yy, xx = np.mgrid[0:size, 0:size] - c
            inside = xx**2 + yy**2 <= r * r
            analytic = np.where(inside, 255.0 / inside.sum(), 0.0)
            assert np.abs(resp - analytic).max() <= 1.0


# 8 -----------------------------------------------------------------------------


@pytest.mark.criterion(C8)
def test_quarter_rotations_identity():
    f = make_natural_frame(64, 64, seed=3)
    g = f
    for _ in range(4):
        g = camera.rotate_frame(g, 90.0)
    assert np.array_equal(g, f)


@pytest.mark.criterion(C8)
def test_translation_subwindows():
    clip = Clip("t", np.stack([make_natural_frame(256, 256, seed=i) for i in range(5)]))
    seeds = [derive_seed(SeedContext(0), "t", "translation", 5, t) for t in range(5)]
    with Timer(10):
        out = camera.translation_crop(clip, 16, seeds)
        for src, crop in zip(clip.frames, out.frames):
            assert crop.shape == (224, 224, 3)
            matches = sum(
                np.array_equal(src[t : t + 224, l : l + 224], crop) for t in range(33) for l in range(33)
            )
            assert matches == 1


# 9 -----------------------------------------------------------------------------


@pytest.mark.criterion(C9)
def test_jpeg_size_monotone():
    clip = make_clip("codec", T=16, h=224, w=224)
    for frame in clip.frames:
        sizes = [len(codec.jpeg_encode(frame, q)) for q in DEFAULT.values("jpeg", "quality")]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))


@pytest.mark.criterion(C9)
@pytest.mark.parametrize("standard", ["mpeg1", "mpeg2"])
def test_mpeg_psnr_monotone(standard):
    if not codec.encoder_available():
        pytest.skip("no external encoder; MPEG monotonicity not checked")
    clip = make_clip("codec", T=16, h=224, w=224)
    with Timer(60):
        psnrs = []
        for fraction in DEFAULT.values(standard, "bitrate_fraction"):
            out = codec.mpeg_roundtrip(clip, standard, fraction).clip
            assert out.frames.shape == clip.frames.shape
            psnrs.append(float(np.mean([codec.psnr(a, b) for a, b in zip(clip.frames, out.frames)])))
    print(standard, [round(v, 2) for v in psnrs])
    assert all(b <= a + 0.2 for a, b in zip(psnrs, psnrs[1:]))


# 10 ----------------------------------------------------------------------------


@pytest.mark.criterion(C10)
def test_end_to_end_determinism(tmp_path):
    entries = []
    for i in range(3):
        path = tmp_path / f"clip{i}.npy"
        np.save(path, make_clip(f"clip{i}", T=16, h=48, w=64, seed=10 + i).frames)
        entries.append(bench.TestEntry(f"clip{i}", str(path), i))
    specs = enumerate_specs()
    if not codec.encoder_available():
        specs = [p for p in specs if p.kind not in MPEG_KINDS]
    with Timer(120):
        one = bench.build_benchmark(entries, SeedContext(2024), tmp_path / "w1", specs, workers=1)
        eight = bench.build_benchmark(entries, SeedContext(2024), tmp_path / "w8", specs, workers=8)
    assert one.failed == 0 and eight.failed == 0
    assert len(one.rows) == len(specs) * 3

    def sums(summary):
        return {(r["video_id"], r["kind"], r["severity"]): r["checksum"]
                for r in summary.rows if r["kind"] not in MPEG_KINDS}

    assert sums(one) == sums(eight)
    assert len(sums(one)) == 80 * 3


# 11 ----------------------------------------------------------------------------


@pytest.mark.criterion(C11)
def test_index_map_round_trip(tmp_path):
    clip = make_clip("rt", T=40, h=16, w=16)
    ctx = SeedContext(77)
    with Timer(5):
        for spec in enumerate_specs(category="Temporal"):
            from vidshift.dispatch import index_map_for

            imap = index_map_for(spec, clip, ctx)
            path = tmp_path / f"{spec.kind}_{spec.severity}.txt"
            tp.write_index_maps(path, [tp.IndexMapRecord(clip.id, spec.kind, spec.severity, imap)])
            (loaded,) = tp.read_index_maps(path)
            direct = apply(spec, clip, ctx).frames
            reloaded = tp.apply_index_map(clip, loaded.index_map).frames
            assert direct.tobytes() == reloaded.tobytes()


# 12 ----------------------------------------------------------------------------


@pytest.mark.criterion(C12)
def test_protocol_crop_starts():
    with Timer(5):
        for clip_len, stride in protocol.MODEL_SAMPLING.values():
            span = (clip_len - 1) * stride + 1
            for T in range(1, 513):
                for n in (1, 5, 10):
                    starts = protocol.temporal_crop_starts(T, n, clip_len, stride)
                    assert len(starts) == n
                    assert all(a <= b for a, b in zip(starts, starts[1:]))
                    assert all(0 <= s <= max(T - 1, 0) for s in starts)
                    if T >= span and n >= 2:
                        assert starts[0] == 0 and starts[-1] == T - span


@pytest.mark.criterion(C12)
def test_center_crop_idempotent():
    for h, w in [(224, 224), (256, 256), (256, 320), (300, 240), (120, 160)]:
        f = make_natural_frame(h, w)
        once = protocol.center_crop(f, 224)
        assert np.array_equal(protocol.center_crop(once, 224), once)
