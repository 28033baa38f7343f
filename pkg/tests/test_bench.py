import json

import numpy as np
import pytest

from vidshift import bench
from vidshift.core import SeedContext, select_specs
from vidshift.errors import ManifestConflict, MalformedFile
from vidshift.io import read_frame_dir

from conftest import make_clip


def make_test_list(tmp_path, n=2, T=6, size=24):
    entries = []
    src = tmp_path / "src"
    src.mkdir(exist_ok=True)
    for i in range(n):
        clip = make_clip(f"vid{i}", T=T, h=size, w=size, seed=i)
        path = src / f"vid{i}.npy"
        np.save(path, clip.frames)
        entries.append(bench.TestEntry(f"vid{i}", str(path), i % 3))
    return entries


def rows_by_key(summary):
    return {(r["video_id"], r["kind"], r["severity"]): r for r in summary.rows}


def test_test_list_round_trip(tmp_path):
    entries = make_test_list(tmp_path)
    path = tmp_path / "list.csv"
    bench.write_test_list(path, entries)
    assert bench.read_test_list(path) == entries


def test_test_list_rejects_duplicates(tmp_path):
    path = tmp_path / "list.csv"
    path.write_text("video_id,path,label\na,x,1\na,y,2\n")
    with pytest.raises(MalformedFile):
        bench.read_test_list(path, check_paths=False)


def test_dry_run_row_count(tmp_path):
    entries = [bench.TestEntry(f"v{i}", f"/missing/{i}.mp4", 0) for i in range(2)]
    summary = bench.build_benchmark(entries, SeedContext(0), tmp_path / "out", dry_run=True)
    assert len(summary.rows) == 180
    header, rows = bench.read_manifest(summary.manifest_path)
    assert header["master_seed"] == 0 and len(rows) == 180


def test_build_verify_resume(tmp_path):
    entries = make_test_list(tmp_path)
    specs = select_specs(["temporal", "gaussian", "jpeg"])
    out = tmp_path / "out"
    first = bench.build_benchmark(entries, SeedContext(5), out, specs)
    assert first.built == len(specs) * 2 and first.failed == 0
    assert bench.verify_benchmark(out).ok

    # temporal outputs are index maps only
    row = rows_by_key(first)[("vid0", "jumbling", 2)]
    assert (out / row["index_map"]).exists()
    assert not list((out / row["path"]).glob("*.png"))

    again = bench.build_benchmark(entries, SeedContext(5), out, specs)
    assert (again.built, again.skipped) == (0, len(specs) * 2)

    victim = rows_by_key(first)[("vid1", "gaussian", 3)]
    (out / victim["path"] / "frame_00002.png").unlink()
    third = bench.build_benchmark(entries, SeedContext(5), out, specs)
    assert third.built == 1
    assert {k: r["checksum"] for k, r in rows_by_key(third).items()} == {
        k: r["checksum"] for k, r in rows_by_key(first).items()
    }


def test_manifest_conflict(tmp_path):
    entries = make_test_list(tmp_path, n=1)
    out = tmp_path / "out"
    bench.build_benchmark(entries, SeedContext(1), out, select_specs(["sampling"]))
    with pytest.raises(ManifestConflict):
        bench.build_benchmark(entries, SeedContext(2), out, select_specs(["sampling"]))


def test_verify_detects_corruption_and_missing(tmp_path):
    entries = make_test_list(tmp_path, n=1)
    out = tmp_path / "out"
    summary = bench.build_benchmark(entries, SeedContext(0), out, select_specs(["defocus", "freezing"]))
    rows = rows_by_key(summary)
    frame = out / rows[("vid0", "defocus", 1)]["path"] / "frame_00000.png"
    frame.write_bytes(frame.read_bytes()[:40])
    (out / rows[("vid0", "freezing", 3)]["index_map"]).unlink()
    report = bench.verify_benchmark(out / bench.MANIFEST_NAME)
    assert [(r["kind"], r["severity"]) for r in report.corrupt] == [("defocus", 1)]
    assert [(r["kind"], r["severity"]) for r in report.missing] == [("freezing", 3)]


def test_undecodable_video_does_not_abort(tmp_path):
    entries = make_test_list(tmp_path, n=1)
    bad = tmp_path / "src" / "broken.npy"
    bad.write_bytes(b"not an array")
    entries.append(bench.TestEntry("broken", str(bad), 0))
    summary = bench.build_benchmark(entries, SeedContext(0), tmp_path / "out", select_specs(["reversal"]))
    assert summary.failed == 5 and summary.built == 5
    failed = [r for r in summary.rows if r["status"] == "failed"]
    assert {r["video_id"] for r in failed} == {"broken"}
    assert not bench.verify_benchmark(tmp_path / "out").ok


def test_truncated_manifest_tail_ignored(tmp_path):
    entries = make_test_list(tmp_path, n=1)
    out = tmp_path / "out"
    bench.build_benchmark(entries, SeedContext(0), out, select_specs(["sampling"]))
    path = out / bench.MANIFEST_NAME
    with open(path, "a") as fh:
        fh.write('{"type": "row", "video_')
    _, rows = bench.read_manifest(path)
    assert len(rows) == 5


def test_perturbed_frames_on_disk_match_checksum(tmp_path):
    from vidshift.core import pixel_checksum

    entries = make_test_list(tmp_path, n=1)
    out = tmp_path / "out"
    summary = bench.build_benchmark(entries, SeedContext(0), out, select_specs(["Camera/translation/2"]))
    row = summary.rows[0]
    frames = read_frame_dir(out / row["path"])
    assert frames.shape[1:3] == (224, 224)
    assert pixel_checksum(frames) == row["checksum"]
    assert sorted(p.name for p in (out / row["path"]).iterdir())[0] == "frame_00000.png"


def test_manifest_lines_are_json(tmp_path):
    entries = make_test_list(tmp_path, n=1)
    out = tmp_path / "out"
    bench.build_benchmark(entries, SeedContext(0), out, select_specs(["sampling"]), protocol={"n": 1})
    lines = (out / bench.MANIFEST_NAME).read_text().splitlines()
    header = json.loads(lines[0])
    assert header["type"] == "header" and header["ladder_version"] == "v1" and header["protocol"] == {"n": 1}
    assert len(lines) == 6
