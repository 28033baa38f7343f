"""vidshift: deterministic video perturbation benchmarks and robustness scores."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CATEGORIES,
    KINDS,
    Clip,
    PerturbationSpec,
    SeedContext,
    derive_seed,
    enumerate_specs,
    pixel_checksum,
)
from .dispatch import apply, index_map_for  # noqa: E402
from .ladders import DEFAULT as DEFAULT_LADDER, Ladder  # noqa: E402
from .metrics import aggregate, accuracy, gamma_abs, gamma_rel, gamma_rel_perturb_trained  # noqa: E402

__all__ = [
    "CATEGORIES",
    "KINDS",
    "Clip",
    "DEFAULT_LADDER",
    "Ladder",
    "PerturbationSpec",
    "SeedContext",
    "accuracy",
    "aggregate",
    "apply",
    "derive_seed",
    "enumerate_specs",
    "gamma_abs",
    "gamma_rel",
    "gamma_rel_perturb_trained",
    "index_map_for",
    "pixel_checksum",
]
