"""JSON run configurations.  Unknown keys are rejected."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path

import numpy as np

from .jets import Field, SpaceGrid
from .solutions import from_dict as solution_from_dict
from .solver import CauchyProblem, SolverConfig


class ConfigError(ValueError):
    pass


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name: f for f in fields(cls)}
    extra = set(data) - set(known)
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    kw = {}
    for name, value in data.items():
        sub = _NESTED.get((cls.__name__, name))
        kw[name] = _build(sub, value, f"{where}.{name}") if sub else value
    try:
        return cls(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


@dataclass
class InitialData:
    """kind: "gaussian" (m0 = amplitude exp(-x^2)), "zero", "catalog" or "csv"."""

    kind: str = "gaussian"
    amplitude: float = 0.5
    solution: dict | None = None
    path: str | None = None
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "zero", "catalog", "csv"):
            raise ValueError(f"unknown initial data kind {self.kind!r}")
        if self.kind == "catalog" and self.solution is None:
            raise ValueError("catalog initial data needs 'solution'")
        if self.kind == "csv" and self.path is None:
            raise ValueError("csv initial data needs 'path'")

    def problem(self, grid: SpaceGrid) -> CauchyProblem:
        if self.kind == "gaussian":
            return CauchyProblem.gaussian(self.amplitude)
        if self.kind == "zero":
            return CauchyProblem(u0=lambda x: np.zeros_like(x), label="zero")
        if self.kind == "catalog":
            spec = solution_from_dict(self.solution)
            return CauchyProblem(u0=lambda x: spec.jet(self.t, x).u, label=spec.kind)
        values = _read_profile(self.path, grid)
        return CauchyProblem(u0=Field(grid, 0.0, values), label=f"csv:{self.path}")


def _read_profile(path, grid: SpaceGrid):
    """Two-column CSV (x, u) sampled on the run grid, header optional."""
    try:
        raw = np.genfromtxt(path, delimiter=",", names=None, skip_header=0)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    raw = np.atleast_2d(raw)
    raw = raw[~np.isnan(raw).any(axis=1)]
    if raw.shape[1] != 2 or raw.shape[0] != grid.n:
        raise ConfigError(f"{path}: need {grid.n} rows of (x, u)")
    if not np.allclose(raw[:, 0], grid.x, atol=1e-9 * grid.half_length):
        raise ConfigError(f"{path}: x column does not match the grid")
    return raw[:, 1]


@dataclass
class SimulationConfig:
    half_length: float = 15.0
    n: int = 2048
    dt: float = 1e-3
    t_end: float = 1.0
    formulation: str = "nonlocal_u"
    snapshot_stride: int = 1
    blowup_threshold: float = 1e6
    quadrature: str = "cubic"
    initial: InitialData = field(default_factory=InitialData)

    def grid(self) -> SpaceGrid:
        return SpaceGrid(float(self.half_length), int(self.n))

    def solver_config(self) -> SolverConfig:
        return SolverConfig(self.grid(), float(self.dt), float(self.t_end), self.formulation,
                            float(self.blowup_threshold), int(self.snapshot_stride), self.quadrature)


@dataclass
class VerifyConfig:
    tol: float = 1e-10
    n_x: int = 201
    n_t: int = 5
    catalog: list | None = None


@dataclass
class ConserveConfig:
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    tol: float = 1e-3
    exp_rate: float = 1.0


@dataclass
class CharacteristicsConfig:
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    seeds: int = 97
    reach: float = 12.0
    m_tol: float = 1e-6
    bound_tol: float = 1e-5


@dataclass
class PSSConfig:
    m1: int = -2
    mu: float = 0.0
    sigma: int = 1


@dataclass
class GeometryConfig:
    """Geometry of a solver run, or of a closed-form solution when ``solution`` is set."""

    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    pss: PSSConfig = field(default_factory=PSSConfig)
    every: int = 10
    w_min: float = 0.1
    solution: dict | None = None
    t_range: list = field(default_factory=lambda: [0.5, 2.0])
    x_range: list = field(default_factory=lambda: [-1.0, 1.0])
    points: int = 201


@dataclass
class ContinuationConfig:
    simulation: SimulationConfig = field(default_factory=lambda: SimulationConfig(t_end=0.5))
    windows: list = field(default_factory=lambda: [[-1.0, 1.0], [-3.0, -2.0], [0.5, 2.5]])
    snapshot: int = -1
    eps0: float = 1e-8


_NESTED = {
    ("SimulationConfig", "initial"): InitialData,
    ("ConserveConfig", "simulation"): SimulationConfig,
    ("CharacteristicsConfig", "simulation"): SimulationConfig,
    ("GeometryConfig", "simulation"): SimulationConfig,
    ("GeometryConfig", "pss"): PSSConfig,
    ("ContinuationConfig", "simulation"): SimulationConfig,
}


def load(cls, path: str | Path | None):
    if path is None:
        return cls()
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return _build(cls, data, cls.__name__)


def to_dict(cfg) -> dict:
    return asdict(cfg) if is_dataclass(cfg) else dict(cfg)
