"""Command-line entry point.

Exit status: 0 success, 1 processing failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .bench import build_benchmark, read_test_list, verify_benchmark
from .core import CATEGORIES, KINDS, TEMPORAL_KINDS, PerturbationSpec, SeedContext, pixel_checksum, select_specs
from .dispatch import apply, index_map_for
from .errors import IncompleteGrid, ManifestConflict, VidshiftError
from .io import read_clip, write_frames
from .ladders import DEFAULT, Ladder
from .metrics import accuracy, aggregate, read_predictions, read_scores, write_scores
from .protocol import MODEL_SAMPLING, PRESET_CROPS, preset
from .report import category_series, robustness_table, severity_series, write_series
from .temporal import IndexMapRecord, write_index_maps

logger = logging.getLogger("vidshift")


def _catalogue() -> str:
    lines = ["perturbation kinds by category:"]
    for cat, kinds in CATEGORIES.items():
        lines.append(f"  {cat}: {', '.join(kinds)}")
    return "\n".join(lines)


def _ladder(args) -> Ladder:
    return Ladder.load(args.ladder) if getattr(args, "ladder", None) else DEFAULT


def cmd_perturb(args) -> int:
    ladder = _ladder(args)
    spec = PerturbationSpec.of(args.kind, args.severity)
    clip = read_clip(args.input, args.video_id, args.encoder)
    ctx = SeedContext(args.seed)
    out = Path(args.output)
    result = apply(spec, clip, ctx, ladder, consistent_noise=args.consistent_noise, encoder=args.encoder)
    write_frames(out, result.frames)
    if spec.kind in TEMPORAL_KINDS:
        imap = index_map_for(spec, clip, ctx, ladder)
        write_index_maps(out / "index_map.txt", [IndexMapRecord(clip.id, spec.kind, spec.severity, imap)])
    logger.info("%s checksum %s", spec, pixel_checksum(result.frames))
    print(out)
    return 0


def cmd_build_bench(args) -> int:
    ladder = _ladder(args)
    specs = select_specs(args.only)
    entries = read_test_list(args.test_list, check_paths=not args.dry_run)
    protocol = preset(args.preset, args.model).to_dict() if args.preset != "custom" else None
    try:
        summary = build_benchmark(
            entries,
            SeedContext(args.seed),
            args.out_root,
            specs,
            ladder=ladder,
            workers=args.workers,
            dry_run=args.dry_run,
            protocol=protocol,
            encoder=args.encoder,
            consistent_noise=args.consistent_noise,
        )
    except ManifestConflict as exc:
        print(f"ManifestConflict: {exc}", file=sys.stderr)
        return 1
    print(f"manifest: {summary.manifest_path}")
    print(summary)
    if args.strict and summary.failed:
        return 1
    return 0


def cmd_score(args) -> int:
    records = read_predictions(args.predictions)
    tables = accuracy(records)
    scores = []
    for model in sorted(tables):
        try:
            score = aggregate(tables[model], allow_partial=args.allow_partial)
        except IncompleteGrid as exc:
            print(f"IncompleteGrid: {exc}; pass --allow-partial to aggregate anyway", file=sys.stderr)
            return 1
        if score.missing:
            warnings.warn(f"{model}: {len(score.missing)} cells missing, aggregates use available severities")
            print(f"warning: {model} is missing {len(score.missing)} cells", file=sys.stderr)
        scores.append(score)
    out = Path(args.output)
    if out.is_dir():
        out = out / "scores.csv"
    write_scores(out, scores)
    print(out)
    return 0


def cmd_report(args) -> int:
    rows = read_scores(args.scores)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "robustness.md").write_text(robustness_table(rows))
    write_series(out / "accuracy_vs_severity.csv", severity_series(rows))
    write_series(out / "category_vs_severity.csv", category_series(rows))
    print(out / "robustness.md")
    return 0


def cmd_verify(args) -> int:
    report = verify_benchmark(args.manifest, encoder=args.encoder)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1


def cmd_dump_ladders(args) -> int:
    text = _ladder(args).dumps()
    if args.output:
        Path(args.output).write_text(text)
        print(args.output)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vidshift",
        description="Build perturbed video benchmarks and score robustness.",
        epilog=_catalogue(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"vidshift {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        if seed:
            p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument("--ladder", help="severity ladder file overriding the defaults")
        p.add_argument("--encoder", help="ffmpeg binary (default: $VIDSHIFT_ENCODER, then PATH, then imageio-ffmpeg)")

    p = sub.add_parser("perturb", help="apply one perturbation to one clip",
                       epilog=_catalogue(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--severity", required=True, type=int, choices=range(1, 6))
    p.add_argument("--video-id", help="clip id used for seeding (default: input name)")
    p.add_argument("--consistent-noise", action="store_true", help="reuse the frame-0 noise seed for all frames")
    common(p)
    p.add_argument("input", help="frame directory, .npy array or video file")
    p.add_argument("output", help="output frame directory")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("build-bench", help="perturb every test video with every selected spec")
    p.add_argument("test_list", help="CSV with video_id,path,label")
    p.add_argument("out_root")
    p.add_argument("--only", nargs="+", metavar="FILTER",
                   help="categories, kinds or Category/kind/severity specs to build")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dry-run", action="store_true", help="write the planned manifest only")
    p.add_argument("--strict", action="store_true", help="exit 1 if any row failed")
    p.add_argument("--preset", choices=sorted(PRESET_CROPS) + ["custom"], default="custom")
    p.add_argument("--model", choices=sorted(MODEL_SAMPLING), default="r3d")
    p.add_argument("--consistent-noise", action="store_true")
    common(p)
    p.set_defaults(func=cmd_build_bench)

    p = sub.add_parser("score", help="accuracy and robustness scores from a prediction log")
    p.add_argument("predictions")
    p.add_argument("-o", "--output", default="scores.csv")
    p.add_argument("--allow-partial", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("report", help="markdown tables and plot series from scores.csv")
    p.add_argument("scores")
    p.add_argument("-o", "--output", default="report")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", help="re-check benchmark outputs against the manifest")
    p.add_argument("manifest", help="manifest.jsonl or the benchmark root")
    p.add_argument("--encoder")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dump-ladders", help="write the severity ladder table")
    p.add_argument("-o", "--output")
    p.add_argument("--ladder", help="ladder file to merge over the defaults")
    p.set_defaults(func=cmd_dump_ladders)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except VidshiftError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
