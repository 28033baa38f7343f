"""Severity ladders: the per-kind parameter values for severities 1..5.

The shipped table is ``benchmark v1``. It can be dumped to and loaded from a
flat text file with one ``kind severity parameter value`` line per entry.
"""

from __future__ import annotations

import copy
from pathlib import Path

from .core import KINDS
from .errors import MalformedFile, UnsupportedSpec

LADDER_VERSION = "v1"

_MOTION_RADII = (5, 7, 9, 12, 15)

DEFAULT_LADDER: dict[str, list[dict[str, float]]] = {
    "gaussian": [{"sigma": v} for v in (0.04, 0.08, 0.12, 0.18, 0.26)],
    "shot": [{"lam": v} for v in (60.0, 25.0, 12.0, 5.0, 3.0)],
    "impulse": [{"p": v} for v in (0.02, 0.04, 0.07, 0.10, 0.17)],
    "speckle": [{"sigma": v} for v in (0.10, 0.20, 0.35, 0.45, 0.60)],
    "defocus": [{"radius": v} for v in (2, 3, 4, 6, 8)],
    "motion": [{"radius": r, "sigma": r / 3.0} for r in _MOTION_RADII],
    "zoom": [{"max_zoom": v, "step": 0.01} for v in (1.06, 1.11, 1.16, 1.21, 1.26)],
    "jpeg": [{"quality": v} for v in (25, 18, 15, 10, 7)],
    "mpeg1": [{"bitrate_fraction": v} for v in (0.50, 0.30, 0.20, 0.12, 0.07)],
    "mpeg2": [{"bitrate_fraction": v} for v in (0.50, 0.30, 0.20, 0.12, 0.07)],
    "sampling": [{"k": v} for v in (2, 3, 4, 5, 6)],
    "reversal": [{"k": v} for v in (2, 3, 4, 5, 6)],
    "jumbling": [{"m": v} for v in (4, 8, 16, 32, 64)],
    "box_jumbling": [{"m": v} for v in (64, 32, 16, 8, 4)],
    "freezing": [{"p_f": v} for v in (0.1, 0.2, 0.3, 0.4, 0.5)],
    "static_rotation": [{"theta": v} for v in (10.0, 20.0, 30.0, 45.0, 60.0)],
    "random_rotation": [{"bound": v} for v in (10.0, 20.0, 30.0, 45.0, 60.0)],
    "translation": [{"jitter": v} for v in (4, 7, 10, 13, 16)],
}

# +1: larger value is a stronger perturbation; -1: smaller value is stronger.
STRENGTH_DIRECTION: dict[tuple[str, str], int] = {
    ("gaussian", "sigma"): 1,
    ("shot", "lam"): -1,
    ("impulse", "p"): 1,
    ("speckle", "sigma"): 1,
    ("defocus", "radius"): 1,
    ("motion", "radius"): 1,
    ("motion", "sigma"): 1,
    ("zoom", "max_zoom"): 1,
    ("jpeg", "quality"): -1,
    ("mpeg1", "bitrate_fraction"): -1,
    ("mpeg2", "bitrate_fraction"): -1,
    ("sampling", "k"): 1,
    ("reversal", "k"): 1,
    ("jumbling", "m"): 1,
    ("box_jumbling", "m"): -1,
    ("freezing", "p_f"): 1,
    ("static_rotation", "theta"): 1,
    ("random_rotation", "bound"): 1,
    ("translation", "jitter"): 1,
}

_INTEGER_PARAMS = {"radius", "quality", "k", "m", "jitter"}


class Ladder:
    """A complete severity table. Index with ``ladder.params(kind, severity)``."""

    def __init__(self, table=None, version: str = LADDER_VERSION):
        self.table = copy.deepcopy(DEFAULT_LADDER if table is None else table)
        self.version = version
        missing = [k for k in KINDS if k not in self.table]
        if missing:
            raise UnsupportedSpec(f"ladder lacks kinds: {missing}")
        for kind, rows in self.table.items():
            if len(rows) != 5:
                raise UnsupportedSpec(f"ladder for {kind} needs 5 severities, has {len(rows)}")

    def params(self, kind: str, severity: int) -> dict:
        if kind not in self.table:
            raise UnsupportedSpec(f"unknown perturbation kind {kind!r}")
        if not 1 <= severity <= 5:
            raise UnsupportedSpec(f"severity must be 1..5, got {severity}")
        return dict(self.table[kind][severity - 1])

    def values(self, kind: str, param: str) -> list:
        return [row[param] for row in self.table[kind]]

    def is_monotone(self) -> dict[tuple[str, str], bool]:
        """Strict monotonicity in strength for every (kind, parameter)."""
        result = {}
        for (kind, param), sign in STRENGTH_DIRECTION.items():
            v = [sign * x for x in self.values(kind, param)]
            result[(kind, param)] = all(a < b for a, b in zip(v, v[1:]))
        return result

    def __eq__(self, other):
        return isinstance(other, Ladder) and self.table == other.table and self.version == other.version

    def dumps(self) -> str:
        lines = ["# vidshift severity ladder", f"# version {self.version}"]
        for kind in KINDS:
            for s, row in enumerate(self.table[kind], start=1):
                for param, value in row.items():
                    lines.append(f"{kind} {s} {param} {_fmt(value)}")
        return "\n".join(lines) + "\n"

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str, base: "Ladder | None" = None) -> "Ladder":
        """Parse a ladder file. Entries override ``base`` (defaults when None)."""
        table = copy.deepcopy((base or cls()).table)
        version = (base or cls()).version
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                words = line[1:].split()
                if len(words) == 2 and words[0] == "version":
                    version = words[1]
                continue
            parts = line.split()
            if len(parts) != 4:
                raise MalformedFile(f"line {lineno}: expected 'kind severity parameter value'")
            kind, sev, param, value = parts
            if kind not in table:
                raise MalformedFile(f"line {lineno}: unknown kind {kind!r}")
            try:
                s = int(sev)
                number = int(value) if param in _INTEGER_PARAMS else float(value)
            except ValueError:
                raise MalformedFile(f"line {lineno}: bad number") from None
            if not 1 <= s <= 5:
                raise MalformedFile(f"line {lineno}: severity {s} out of range")
            table[kind][s - 1][param] = number
        return cls(table, version=version)

    @classmethod
    def load(cls, path, base: "Ladder | None" = None) -> "Ladder":
        return cls.loads(Path(path).read_text(), base=base)


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


DEFAULT = Ladder()
