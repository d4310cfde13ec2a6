"""Flat JSON experiment configuration with CLI-flag overrides."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace

EXPERIMENTS = (
    "poisson_annulus",
    "poisson_sinusoidal",
    "poisson_3d",
    "wave_annulus",
    "gauss_check",
)

DEFAULT_CELLS = {
    "poisson_annulus": [20, 40, 80, 160, 320],
    "poisson_sinusoidal": [20, 40, 80, 160, 320],
    "poisson_3d": [8, 16, 32],
    "wave_annulus": [16, 32, 64, 128, 256],
    "gauss_check": [16, 32, 64],
}

DEFAULT_RADII = {
    "poisson_annulus": (2.0 * math.pi, 3.0 * math.pi),
    "wave_annulus": (2.0, 4.0),
}


@dataclass
class ExperimentConfig:
    experiment: str = "poisson_annulus"
    order: int = 4
    cells: list = None
    radii: tuple = None          # semi-annulus (a, b)
    epsilon: float = 0.06        # sinusoidal perturbation amplitude
    d1: float = 1.0              # anisotropy eigenvalues and rotation
    d2: float = 10.0
    theta: float = math.pi / 4.0
    dt: float = 1e-3
    t_end: float = 1.0
    bc: str = "dirichlet_exact"
    solver: str = None           # per-experiment default when None
    out_dir: str = "out"
    emit_fields: bool = False
    seed: int = 74207281
    samples: int = 100           # random field pairs per gauss-check config
    orders: list = field(default_factory=lambda: [2, 4])  # gauss check

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}"
            )
        if self.cells is None:
            self.cells = list(DEFAULT_CELLS[self.experiment])
        self.cells = [int(c) for c in self.cells]
        if any(c2 <= c1 for c1, c2 in zip(self.cells, self.cells[1:])):
            raise ValueError(f"cell list must be strictly increasing: {self.cells}")
        if self.radii is None:
            self.radii = DEFAULT_RADII.get(self.experiment, (2.0, 4.0))
        self.radii = (float(self.radii[0]), float(self.radii[1]))
        if self.solver is None:
            self.solver = "bicgstab" if self.experiment == "poisson_3d" else "direct"

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        clean = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **clean)


def load_config(path: str = None, overrides: dict = None) -> ExperimentConfig:
    data = {}
    if path is not None:
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    cfg = ExperimentConfig(**data)
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    return cfg
