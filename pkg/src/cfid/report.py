from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import __version__

METRIC_NAMES = ("MFID", "RFID", "CFID", "JFD", "MWD", "RWD", "RWD3", "CWD")
NOISE_FLOOR = 1e-9


def clamp_noise(value: float, floor: float = NOISE_FLOOR) -> float:
    """Map small negative round-off to exactly zero; leave real negatives visible."""
    value = float(value)
    if -floor <= value < 0.0:
        return 0.0
    return value


@dataclass(frozen=True)
class MetricReport:
    """One named metric value with the metadata needed to reproduce it."""

    metric: str
    value: float
    n_samples: int = 0
    dim_x: int = 0
    dim_y: int = 0
    seed: int | None = None
    tolerances: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.metric not in METRIC_NAMES:
            raise ValueError(f"unknown metric {self.metric!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric": self.metric,
            "value": self.value,
            "n": self.n_samples,
            "dim_x": self.dim_x,
            "dim_y": self.dim_y,
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
            "tool_version": __version__,
        }
