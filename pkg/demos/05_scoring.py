"""
Scoring robustness
==================

Prediction logs hold one row per (video, model, perturbation, severity, crop).
Accuracy fuses crops per video; the absolute and relative scores then compare
each cell against clean accuracy and average up to categories.
"""

# %%
import numpy as np

from vidshift import aggregate, accuracy, gamma_abs, gamma_rel
from vidshift.core import enumerate_specs
from vidshift.metrics import PredictionRecord, score_rows
from vidshift.report import robustness_table

# %%
# The two scores differ in what they normalize by. For a 10 point drop:
for a_c in (50.0, 80.0):
    print(f"clean {a_c}: gamma_a {gamma_abs(a_c, a_c - 10):.3f}  gamma_r {gamma_rel(a_c, a_c - 10):.3f}")

# %%
# A fake model whose error rate grows with severity, worse on noise.
rng = np.random.default_rng(0)
n_videos, n_classes = 60, 10
labels = rng.integers(0, n_classes, n_videos)
records = []


def predict(p_correct, pert, sev):
    for v in range(n_videos):
        ok = rng.random() < p_correct
        pred = int(labels[v]) if ok else int((labels[v] + 1) % n_classes)
        records.append(PredictionRecord(f"v{v}", "toy", pert, sev, 0, int(labels[v]), pred))


predict(0.8, "clean", 0)
for spec in enumerate_specs():
    drop = 0.06 * spec.severity * (1.5 if spec.category == "Noise" else 1.0)
    predict(0.8 - drop, spec.kind, spec.severity)

score = aggregate(accuracy(records)["toy"])
print(f"clean {score.clean:.1f}  overall gamma_a {score.overall_a:.3f}  gamma_r {score.overall_r:.3f}")

# %%
# The same table the ``report`` subcommand writes.
print(robustness_table(score_rows(score)))
