"""Markdown robustness tables and plot-ready CSV series from a scores file."""

from __future__ import annotations

import csv
from collections import defaultdict

from .core import KINDS

TABLE_CATEGORIES = ("Noise", "Blur", "Temporal", "Digital", "Camera")


def _fmt(value) -> str:
    if value is None:
        return "-"
    text = f"{value:.2f}"
    # leading zero dropped, ".71", for values in (-1, 1)
    if text.startswith("0."):
        return text[1:]
    if text.startswith("-0."):
        return "-" + text[2:]
    return text


def robustness_table(rows: list[dict]) -> str:
    """One markdown row per model with gamma_a/gamma_r per category and the overall mean."""
    by_model: dict[str, dict] = defaultdict(dict)
    order = []
    for r in rows:
        m = r["model"]
        if m not in by_model:
            order.append(m)
        if r["level"] == "category":
            by_model[m][r["category"]] = (r["gamma_a"], r["gamma_r"])
        elif r["level"] == "overall":
            by_model[m]["Mean"] = (r["gamma_a"], r["gamma_r"])
        else:
            by_model[m]

    cols = TABLE_CATEGORIES + ("Mean",)
    head = "| Network | " + " | ".join(f"{c} γa | {c} γr" for c in cols) + " |"
    sep = "|" + "---|" * (1 + 2 * len(cols))
    lines = [head, sep]
    for m in order:
        cells = []
        for c in cols:
            ga, gr = by_model[m].get(c, (None, None))
            cells += [_fmt(ga), _fmt(gr)]
        lines.append(f"| {m} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def severity_series(rows: list[dict]) -> list[dict]:
    """Accuracy against severity per (model, perturbation), severity 0 being the clean run."""
    clean = {r["model"]: r["accuracy"] for r in rows if r["level"] == "clean"}
    out = []
    cells = [r for r in rows if r["level"] == "cell"]
    kind_rank = {k: i for i, k in enumerate(KINDS)}
    cells.sort(key=lambda r: (r["model"], kind_rank.get(r["perturbation"], 99), r["severity"]))
    seen = set()
    for r in cells:
        key = (r["model"], r["perturbation"])
        if key not in seen and r["model"] in clean:
            seen.add(key)
            out.append(dict(model=r["model"], category=r["category"], perturbation=r["perturbation"],
                            severity=0, accuracy=clean[r["model"]]))
        out.append(dict(model=r["model"], category=r["category"], perturbation=r["perturbation"],
                        severity=r["severity"], accuracy=r["accuracy"]))
    return out


def category_series(rows: list[dict]) -> list[dict]:
    """Mean accuracy per category per severity (the 'mean across types' figure), severity 0 = clean."""
    clean = {r["model"]: r["accuracy"] for r in rows if r["level"] == "clean"}
    groups: dict[tuple, list[float]] = defaultdict(list)
    for r in rows:
        if r["level"] == "cell":
            groups[(r["model"], r["category"], r["severity"])].append(r["accuracy"])
    out = []
    for model in sorted({k[0] for k in groups}):
        for cat in TABLE_CATEGORIES:
            sevs = sorted(s for (m, c, s) in groups if m == model and c == cat)
            if not sevs:
                continue
            if model in clean:
                out.append(dict(model=model, category=cat, severity=0, accuracy=clean[model]))
            for s in sevs:
                vals = groups[(model, cat, s)]
                out.append(dict(model=model, category=cat, severity=s, accuracy=sum(vals) / len(vals)))
    return out


def write_series(path, series: list[dict]) -> None:
    if not series:
        fields = ["model", "category", "perturbation", "severity", "accuracy"]
    else:
        fields = list(series[0])
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        w.writerows(series)
