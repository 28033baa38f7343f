"""Benchmark construction and verification.

Layout under ``out_root``::

    manifest.jsonl
    <kind>/<severity>/<video_id>/frame_00000.png ...   (spatial kinds)
    <kind>/<severity>/<video_id>/clip.m1v|clip.m2v     (mpeg kinds, also)
    <kind>/<severity>/<video_id>/index_map.txt         (temporal kinds only)

Temporal outputs keep only the index map; the manifest row points back at
the clean source. Every row carries a 64-bit checksum of the perturbed
pixels, so verification and resumption compare pixels rather than files.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .core import (
    MPEG_KINDS,
    TEMPORAL_KINDS,
    Clip,
    PerturbationSpec,
    SeedContext,
    enumerate_specs,
    pixel_checksum,
)
from .dispatch import apply, index_map_for
from .errors import MalformedFile, ManifestConflict, VidshiftError
from .io import read_clip, read_frame_dir, write_frames
from .ladders import DEFAULT, Ladder
from .temporal import IndexMapRecord, apply_index_map, read_index_maps, write_index_maps

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
INDEX_MAP_NAME = "index_map.txt"


@dataclass(frozen=True)
class TestEntry:
    video_id: str
    path: str
    label: int


def read_test_list(path, check_paths: bool = True) -> list[TestEntry]:
    """Parse a ``video_id,path,label`` CSV. Relative paths resolve against the CSV's folder."""
    path = Path(path)
    entries, seen = [], set()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["video_id", "path", "label"]:
            raise MalformedFile("test list header must be video_id,path,label")
        for lineno, row in enumerate(reader, start=2):
            vid = row["video_id"].strip()
            if not vid or any(c.isspace() or c in "/\\" for c in vid):
                raise MalformedFile(f"{path}:{lineno}: invalid video id {vid!r}")
            if vid in seen:
                raise MalformedFile(f"{path}:{lineno}: duplicate video id {vid!r}")
            seen.add(vid)
            src = Path(row["path"].strip())
            if not src.is_absolute():
                src = path.parent / src
            if check_paths and not src.exists():
                raise MalformedFile(f"{path}:{lineno}: {src} does not exist")
            try:
                label = int(row["label"])
            except ValueError:
                raise MalformedFile(f"{path}:{lineno}: label must be an integer") from None
            entries.append(TestEntry(vid, str(src), label))
    return entries


def write_test_list(path, entries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["video_id", "path", "label"])
        for e in entries:
            w.writerow([e.video_id, e.path, e.label])


def output_dir(spec: PerturbationSpec, video_id: str) -> str:
    return f"{spec.kind}/{spec.severity}/{video_id}"


# -- manifest


def _header(ctx: SeedContext, ladder: Ladder, protocol: dict | None) -> dict:
    return {
        "type": "header",
        "master_seed": int(ctx.master_seed),
        "ladder_version": ladder.version,
        "tool_version": __version__,
        "protocol": protocol,
    }


def read_manifest(path) -> tuple[dict, dict[tuple[str, str, int], dict]]:
    """Header and rows keyed by (video_id, kind, severity); later rows win.

    A torn final line from an interrupted append is ignored.
    """
    header, rows = None, {}
    lines = Path(path).read_text().splitlines()
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            if i == len(lines) - 1:
                logger.warning("ignoring truncated last manifest line")
                continue
            raise MalformedFile(f"{path}:{i + 1}: invalid JSON") from None
        if obj.get("type") == "header":
            header = obj
        elif obj.get("type") == "row":
            rows[(obj["video_id"], obj["kind"], int(obj["severity"]))] = obj
    if header is None:
        raise MalformedFile(f"{path} has no header line")
    return header, rows


def _write_manifest_atomic(path: Path, header: dict, rows: list[dict]) -> None:
    fd, tmp = tempfile.mkstemp(prefix=".manifest.", dir=path.parent)
    with os.fdopen(fd, "w") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


# -- per-row pixel access


def row_pixels(row: dict, out_root, encoder: str | None = None, source_cache: dict | None = None):
    """Reconstruct the perturbed frames a manifest row describes."""
    out_root = Path(out_root)
    directory = out_root / row["path"]
    if row["kind"] in TEMPORAL_KINDS:
        recs = read_index_maps(out_root / row["index_map"])
        if len(recs) != 1:
            raise MalformedFile(f"{row['index_map']} should hold exactly one index map")
        key = row["source"]
        if source_cache is not None and key in source_cache:
            src = source_cache[key]
        else:
            src = read_clip(row["source"], row["video_id"], encoder)
            if source_cache is not None:
                source_cache[key] = src
        return apply_index_map(src, recs[0].index_map).frames
    return read_frame_dir(directory)


def _row_status(row: dict, out_root: Path, encoder, cache) -> str:
    """'ok', 'missing' or 'corrupt' for a completed row."""
    paths = [out_root / row["path"]]
    if row["kind"] in TEMPORAL_KINDS:
        paths = [out_root / row["index_map"], Path(row["source"])]
    if not all(p.exists() for p in paths):
        return "missing"
    if row["kind"] not in TEMPORAL_KINDS:
        n_files = len(list((out_root / row["path"]).glob("frame_*.png")))
        if n_files < row.get("frames", 0):
            return "missing"
    try:
        frames = row_pixels(row, out_root, encoder, cache)
    except (VidshiftError, OSError, ValueError):
        return "corrupt"
    return "ok" if pixel_checksum(frames) == row.get("checksum") else "corrupt"


# -- building


@dataclass
class BuildSummary:
    manifest_path: Path
    built: int = 0
    skipped: int = 0
    failed: int = 0
    rows: list[dict] = field(default_factory=list)

    def __str__(self) -> str:
        return f"rows: {len(self.rows)}, built: {self.built}, skipped: {self.skipped}, failed: {self.failed}"


def _build_one(spec: PerturbationSpec, clip: Clip, entry: TestEntry, ctx, ladder, out_root: Path,
               encoder, consistent_noise) -> dict:
    rel = output_dir(spec, entry.video_id)
    row = {
        "type": "row",
        "video_id": entry.video_id,
        "kind": spec.kind,
        "severity": spec.severity,
        "path": rel,
        "index_map": None,
        "source": None,
    }
    target = out_root / rel
    if spec.kind in TEMPORAL_KINDS:
        imap = index_map_for(spec, clip, ctx, ladder)
        frames = apply_index_map(clip, imap).frames
        target.mkdir(parents=True, exist_ok=True)
        tmp = target / (INDEX_MAP_NAME + ".tmp")
        write_index_maps(tmp, [IndexMapRecord(entry.video_id, spec.kind, spec.severity, imap)])
        os.replace(tmp, target / INDEX_MAP_NAME)
        row["index_map"] = f"{rel}/{INDEX_MAP_NAME}"
        row["source"] = entry.path
    elif spec.kind in MPEG_KINDS:
        from .codec import mpeg_roundtrip

        params = ladder.params(spec.kind, spec.severity)
        result = mpeg_roundtrip(clip, spec.kind, float(params["bitrate_fraction"]), encoder=encoder)
        frames = result.clip.frames
        write_frames(target, frames)
        ext = "m1v" if spec.kind == "mpeg1" else "m2v"
        (target / f"clip.{ext}").write_bytes(result.encoded)
        row["encoder_argv"] = [[os.path.basename(a[0])] + a[1:] for a in result.argv]
    else:
        frames = apply(spec, clip, ctx, ladder, consistent_noise=consistent_noise, encoder=encoder).frames
        write_frames(target, frames)
    row.update(status="ok", checksum=pixel_checksum(frames), frames=int(frames.shape[0]),
               height=int(frames.shape[1]), width=int(frames.shape[2]))
    return row


def _process_video(entry: TestEntry, specs, existing: dict, master_seed: int, ladder_table, ladder_version,
                   out_root: str, encoder, consistent_noise):
    """Worker body: verify or build every spec for one video. Returns (rows, built, skipped, failed)."""
    ctx = SeedContext(master_seed)
    ladder = Ladder(ladder_table, ladder_version)
    root = Path(out_root)
    cache: dict = {}
    clip = None
    load_error = None
    rows, built, skipped, failed = [], 0, 0, 0

    for spec in specs:
        prev = existing.get((spec.kind, spec.severity))
        if prev is not None and prev.get("status") == "ok":
            if _row_status(prev, root, encoder, cache) == "ok":
                rows.append(prev)
                skipped += 1
                continue
        if clip is None and load_error is None:
            try:
                clip = cache.get(entry.path) or read_clip(entry.path, entry.video_id, encoder)
            except VidshiftError as exc:
                load_error = exc
                logger.error("cannot decode %s: %s", entry.video_id, exc)
        if load_error is not None:
            rows.append(_failed_row(entry, spec, f"{type(load_error).__name__}: {load_error}"))
            failed += 1
            continue
        try:
            rows.append(_build_one(spec, clip, entry, ctx, ladder, root, encoder, consistent_noise))
            built += 1
        except VidshiftError as exc:
            logger.error("%s %s failed: %s", entry.video_id, spec, exc)
            rows.append(_failed_row(entry, spec, f"{type(exc).__name__}: {exc}"))
            failed += 1
    return rows, built, skipped, failed


def _failed_row(entry, spec, message):
    return {"type": "row", "video_id": entry.video_id, "kind": spec.kind, "severity": spec.severity,
            "path": output_dir(spec, entry.video_id), "index_map": None, "source": None,
            "status": "failed", "error": message, "checksum": None}


def build_benchmark(
    test_list: list[TestEntry],
    ctx: SeedContext,
    out_root,
    specs: list[PerturbationSpec] | None = None,
    *,
    ladder: Ladder = DEFAULT,
    workers: int = 1,
    dry_run: bool = False,
    protocol: dict | None = None,
    encoder: str | None = None,
    consistent_noise: bool = False,
) -> BuildSummary:
    """Produce every (video, spec) output under ``out_root`` and write the manifest.

    Rows already present with matching pixel checksums are skipped. A
    manifest with a different master seed or ladder version raises
    ManifestConflict. ``dry_run`` writes a manifest of planned rows only.
    """
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    specs = enumerate_specs() if specs is None else list(specs)
    manifest_path = out_root / MANIFEST_NAME
    header = _header(ctx, ladder, protocol)
    summary = BuildSummary(manifest_path)

    existing: dict = {}
    if manifest_path.exists():
        old_header, existing = read_manifest(manifest_path)
        for key in ("master_seed", "ladder_version"):
            if old_header.get(key) != header[key]:
                raise ManifestConflict(
                    f"existing manifest has {key}={old_header.get(key)!r}, this build uses {header[key]!r}"
                )

    if dry_run:
        summary.rows = [
            {"type": "row", "video_id": e.video_id, "kind": p.kind, "severity": p.severity,
             "path": output_dir(p, e.video_id), "status": "planned", "checksum": None}
            for e in test_list
            for p in specs
        ]
        _write_manifest_atomic(manifest_path, header, summary.rows)
        return summary

    # rows for videos/specs outside this build are carried over untouched
    wanted = {(e.video_id, p.kind, p.severity) for e in test_list for p in specs}
    carried = [r for k, r in existing.items() if k not in wanted]

    per_video = {e.video_id: {} for e in test_list}
    for (vid, kind, sev), row in existing.items():
        if vid in per_video:
            per_video[vid][(kind, sev)] = row

    jobs = [
        (e, specs, per_video[e.video_id], int(ctx.master_seed), ladder.table, ladder.version,
         str(out_root), encoder, consistent_noise)
        for e in test_list
    ]

    results: dict[str, list[dict]] = {}
    with open(manifest_path, "a") as journal:
        if not existing:
            journal.write(json.dumps(header, sort_keys=True) + "\n")
            journal.flush()

        def record(vid, outcome):
            rows, built, skipped, failed = outcome
            results[vid] = rows
            summary.built += built
            summary.skipped += skipped
            summary.failed += failed
            # rows are appended only after their files exist
            for row in rows:
                journal.write(json.dumps(row, sort_keys=True) + "\n")
            journal.flush()
            os.fsync(journal.fileno())

        if workers <= 1:
            for job in jobs:
                record(job[0].video_id, _process_video(*job))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [(job[0].video_id, pool.submit(_process_video, *job)) for job in jobs]
                for vid, fut in futures:
                    record(vid, fut.result())

    summary.rows = carried + [row for e in test_list for row in results[e.video_id]]
    _write_manifest_atomic(manifest_path, header, summary.rows)
    return summary


# -- verification


@dataclass
class VerifyReport:
    checked: int = 0
    missing: list[dict] = field(default_factory=list)
    corrupt: list[dict] = field(default_factory=list)
    failed: list[dict] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return len(self.missing) + len(self.corrupt) + len(self.failed)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def lines(self) -> list[str]:
        out = [f"checked: {self.checked}, missing: {len(self.missing)}, corrupt: {len(self.corrupt)}, "
               f"failed: {len(self.failed)}"]
        for label, rows in (("missing", self.missing), ("corrupt", self.corrupt), ("failed", self.failed)):
            for r in rows:
                out.append(f"{label} {r['video_id']} {r['kind']} {r['severity']} {r.get('path', '')}")
        return out


def verify_benchmark(manifest_path, encoder: str | None = None) -> VerifyReport:
    """Re-check presence and pixel checksums of every row."""
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / MANIFEST_NAME
    out_root = manifest_path.parent
    _, rows = read_manifest(manifest_path)
    report = VerifyReport()
    cache: dict = {}
    for row in rows.values():
        report.checked += 1
        if row.get("status") != "ok":
            report.failed.append(row)
            continue
        status = _row_status(row, out_root, encoder, cache)
        if status == "missing":
            report.missing.append(row)
        elif status == "corrupt":
            report.corrupt.append(row)
    return report
