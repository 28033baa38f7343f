"""Accuracy from prediction logs and the absolute/relative robustness scores."""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import numpy as np

from .core import CATEGORIES, KIND_TO_CATEGORY, KINDS, SEVERITIES
from .errors import (
    EmptyGroup,
    IncompleteGrid,
    InconsistentLabels,
    MalformedFile,
    ZeroCleanAccuracy,
)

CLEAN = "clean"
PREDICTION_HEADER = ["video_id", "model", "perturbation", "severity", "crop_id", "true_label", "pred"]


@dataclass(frozen=True)
class PredictionRecord:
    video_id: str
    model: str
    perturbation: str
    severity: int
    crop_id: int
    true_label: int
    pred: int | tuple[float, ...]

    def __post_init__(self):
        if (self.severity == 0) != (self.perturbation == CLEAN):
            raise ValueError(f"severity 0 is reserved for clean runs: {self.perturbation}@{self.severity}")
        if self.perturbation != CLEAN and self.perturbation not in KIND_TO_CATEGORY:
            raise ValueError(f"unknown perturbation {self.perturbation!r}")
        if not 0 <= self.severity <= 5:
            raise ValueError(f"severity {self.severity} out of range")

    @property
    def has_scores(self) -> bool:
        return not isinstance(self.pred, (int, np.integer))


def parse_pred(text: str) -> int | tuple[float, ...]:
    text = text.strip()
    if "|" in text or "." in text or "e" in text.lower():
        return tuple(float(v) for v in text.split("|"))
    return int(text)


def format_pred(pred) -> str:
    if isinstance(pred, (int, np.integer)):
        return str(int(pred))
    return "|".join(repr(float(v)) for v in pred)


def read_predictions(path) -> list[PredictionRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != PREDICTION_HEADER:
            raise MalformedFile(f"prediction log header must be {','.join(PREDICTION_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                records.append(
                    PredictionRecord(
                        video_id=row["video_id"],
                        model=row["model"],
                        perturbation=row["perturbation"],
                        severity=int(row["severity"]),
                        crop_id=int(row["crop_id"]),
                        true_label=int(row["true_label"]),
                        pred=parse_pred(row["pred"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise MalformedFile(f"{path}:{lineno}: {exc}") from exc
    return records


def write_predictions(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PREDICTION_HEADER)
        for r in records:
            w.writerow([r.video_id, r.model, r.perturbation, r.severity, r.crop_id, r.true_label, format_pred(r.pred)])


def video_prediction(crops: list[PredictionRecord]) -> int:
    """Fuse per-crop outputs: argmax of the mean score vector, else majority vote.

    Vote ties go to the smallest class id, as does an argmax tie.
    """
    if not crops:
        raise EmptyGroup("no crop records for video")
    with_scores = [c.has_scores for c in crops]
    if all(with_scores):
        lengths = {len(c.pred) for c in crops}
        if len(lengths) != 1:
            raise ValueError("score vectors within a video differ in length")
        # sort by crop id so float summation order does not depend on input order
        ordered = sorted(crops, key=lambda c: c.crop_id)
        mean = np.mean(np.array([c.pred for c in ordered], dtype=np.float64), axis=0)
        return int(np.argmax(mean))
    if any(with_scores):
        raise ValueError("a video mixes score vectors and hard labels")
    votes = Counter(int(c.pred) for c in crops)
    best = max(votes.values())
    return min(label for label, n in votes.items() if n == best)


@dataclass
class AccuracyTable:
    """Top-1 accuracy in percent for one model."""

    model: str
    clean: float | None = None
    cells: dict[tuple[str, int], float] = field(default_factory=dict)
    counts: dict[tuple[str, int], int] = field(default_factory=dict)

    def get(self, kind: str, severity: int) -> float:
        if kind == CLEAN:
            return self.clean
        return self.cells[(kind, severity)]


def accuracy(records) -> dict[str, AccuracyTable]:
    """Per-model accuracy for the clean run and every (kind, severity) present."""
    groups: dict[tuple, dict[str, list[PredictionRecord]]] = defaultdict(lambda: defaultdict(list))
    for r in records:
        groups[(r.model, r.perturbation, r.severity)][r.video_id].append(r)

    tables: dict[str, AccuracyTable] = {}
    for (model, kind, severity), videos in sorted(groups.items()):
        if not videos:
            raise EmptyGroup(f"no videos for {model} {kind}@{severity}")
        correct = 0
        for vid, crops in videos.items():
            labels = {c.true_label for c in crops}
            if len(labels) != 1:
                raise InconsistentLabels(f"video {vid} has labels {sorted(labels)} in {kind}@{severity}")
            correct += video_prediction(crops) == labels.pop()
        acc = 100.0 * correct / len(videos)
        table = tables.setdefault(model, AccuracyTable(model))
        if kind == CLEAN:
            table.clean = acc
            table.counts[(CLEAN, 0)] = len(videos)
        else:
            table.cells[(kind, severity)] = acc
            table.counts[(kind, severity)] = len(videos)
    return tables


def gamma_abs(a_clean: float, a_perturbed: float) -> float:
    """Absolute robustness: one minus the accuracy drop in fractions of 100 points."""
    return 1.0 - (a_clean - a_perturbed) / 100.0


def gamma_rel(a_clean: float, a_perturbed: float) -> float:
    """Relative robustness, the perturbed accuracy as a fraction of clean accuracy."""
    if a_clean == 0:
        raise ZeroCleanAccuracy("relative robustness is undefined for zero clean accuracy")
    return 1.0 - (a_clean - a_perturbed) / a_clean


def gamma_rel_perturb_trained(a_clean_trained: float, a_perturb_trained: float) -> float:
    """Relative score of a clean-trained model against a perturbation-trained one.

    The perturbation-trained accuracy is the reference; values above 1 mean
    the clean-trained model scored below it.
    """
    if a_perturb_trained == 0:
        raise ZeroCleanAccuracy("reference accuracy of the perturbation-trained model is zero")
    return 1.0 - (a_clean_trained - a_perturb_trained) / a_perturb_trained


@dataclass
class RobustnessScore:
    model: str
    clean: float
    accuracy: dict[tuple[str, int], float]
    gamma_a: dict[tuple[str, int], float]
    gamma_r: dict[tuple[str, int], float]
    kind_a: dict[str, float]
    kind_r: dict[str, float]
    kind_accuracy: dict[str, float]
    category_a: dict[str, float]
    category_r: dict[str, float]
    category_accuracy: dict[str, float]
    overall_a: float
    overall_r: float
    overall_accuracy: float
    missing: list[tuple[str, int]] = field(default_factory=list)


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values) if values else float("nan")


def aggregate(
    table: AccuracyTable,
    severities=SEVERITIES,
    kinds=KINDS,
    allow_partial: bool = False,
) -> RobustnessScore:
    """Score every cell, then average over severities, categories and all kinds.

    Missing cells raise IncompleteGrid unless ``allow_partial``; then each
    aggregate averages whatever is available.
    """
    if table.clean is None:
        raise IncompleteGrid([(table.model, CLEAN, 0)])
    missing = [(k, s) for k in kinds for s in severities if (k, s) not in table.cells]
    if missing and not allow_partial:
        raise IncompleteGrid([(table.model, k, s) for k, s in missing])

    a_c = table.clean
    acc, ga, gr = {}, {}, {}
    for k in kinds:
        for s in severities:
            if (k, s) in table.cells:
                a = table.cells[(k, s)]
                acc[(k, s)] = a
                ga[(k, s)] = gamma_abs(a_c, a)
                gr[(k, s)] = gamma_rel(a_c, a)

    def per_kind(cell):
        out = {}
        for k in kinds:
            vals = [cell[(k, s)] for s in severities if (k, s) in cell]
            if vals:
                out[k] = _mean(vals)
        return out

    kind_a, kind_r, kind_acc = per_kind(ga), per_kind(gr), per_kind(acc)

    def per_category(per):
        out = {}
        for cat, members in CATEGORIES.items():
            vals = [per[k] for k in members if k in per]
            if vals:
                out[cat] = _mean(vals)
        return out

    return RobustnessScore(
        model=table.model,
        clean=a_c,
        accuracy=acc,
        gamma_a=ga,
        gamma_r=gr,
        kind_a=kind_a,
        kind_r=kind_r,
        kind_accuracy=kind_acc,
        category_a=per_category(kind_a),
        category_r=per_category(kind_r),
        category_accuracy=per_category(kind_acc),
        overall_a=_mean(kind_a.values()),
        overall_r=_mean(kind_r.values()),
        overall_accuracy=_mean(kind_acc.values()),
        missing=missing,
    )


def implied_clean_accuracy(gamma_a: float, gamma_r: float) -> float:
    """Clean accuracy consistent with a (gamma_a, gamma_r) pair: ``100 (1 - ga) / (1 - gr)``."""
    if gamma_r == 1:
        raise ZeroDivisionError("no accuracy drop; clean accuracy is not identifiable")
    return 100.0 * (1.0 - gamma_a) / (1.0 - gamma_r)


# -- scores.csv

SCORES_HEADER = ["model", "level", "category", "perturbation", "severity", "accuracy", "gamma_a", "gamma_r"]


def score_rows(score: RobustnessScore) -> list[dict]:
    rows = [dict(level="clean", category="", perturbation=CLEAN, severity=0, accuracy=score.clean, gamma_a=1.0, gamma_r=1.0)]
    for (k, s), a in score.accuracy.items():
        rows.append(dict(level="cell", category=KIND_TO_CATEGORY[k], perturbation=k, severity=s,
                         accuracy=a, gamma_a=score.gamma_a[(k, s)], gamma_r=score.gamma_r[(k, s)]))
    for k in score.kind_a:
        rows.append(dict(level="kind", category=KIND_TO_CATEGORY[k], perturbation=k, severity="",
                         accuracy=score.kind_accuracy[k], gamma_a=score.kind_a[k], gamma_r=score.kind_r[k]))
    for c in score.category_a:
        rows.append(dict(level="category", category=c, perturbation="", severity="",
                         accuracy=score.category_accuracy[c], gamma_a=score.category_a[c], gamma_r=score.category_r[c]))
    rows.append(dict(level="overall", category="", perturbation="", severity="",
                     accuracy=score.overall_accuracy, gamma_a=score.overall_a, gamma_r=score.overall_r))
    for r in rows:
        r["model"] = score.model
    return rows


def write_scores(path, scores) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SCORES_HEADER)
        w.writeheader()
        for score in scores:
            for row in score_rows(score):
                w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def read_scores(path) -> list[dict]:
    """Rows of a scores file with numeric fields converted."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SCORES_HEADER:
            raise MalformedFile(f"scores header must be {','.join(SCORES_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                row["severity"] = int(row["severity"]) if row["severity"] != "" else None
                for key in ("accuracy", "gamma_a", "gamma_r"):
                    row[key] = float(row[key])
            except ValueError as exc:
                raise MalformedFile(f"{path}:{lineno}: {exc}") from exc
            if row["level"] not in {"clean", "cell", "kind", "category", "overall"}:
                raise MalformedFile(f"{path}:{lineno}: unknown level {row['level']!r}")
            rows.append(row)
    return rows
