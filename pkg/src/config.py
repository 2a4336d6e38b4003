from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from src.exception import ConfigError


@dataclass
class EnvironmentConfig:
    name: str
    num_workers: int
    working_dir: str
    output_dir: str


@dataclass
class ScaleConfig:
    name: str  # desk or full
    deflate_trials: int
    estimate_trials: int
    simulation_trials: int


@dataclass
class PowerSettings:
    tol: float
    max_iter: int


@dataclass
class NewtonSettings:
    tol: float
    max_iter: int
    damping: float
    max_halvings: int
    outer_max_iter: int
    joint_tol: float


@dataclass
class FixedPointSettings:
    tol: float
    max_iter: int
    polish_after: int
    density_eps: float


@dataclass
class SolverSettings:
    power: PowerSettings
    newton: NewtonSettings
    fixed_point: FixedPointSettings


@dataclass
class GridConfig:
    start: float
    stop: float
    step: float


@dataclass
class CommonConfig:
    job_name: str
    seed: int
    svg: bool
    env: EnvironmentConfig
    scale: ScaleConfig
    solver: SolverSettings


@dataclass
class SpectrumConfig(CommonConfig):
    p: int
    beta1: float
    beta2: float
    alpha: float
    gamma: Optional[float]
    matrix_input: str  # noise or full
    bins: int
    grid_points: int


@dataclass
class DeflateConfig(CommonConfig):
    p: int
    beta1: GridConfig
    beta2: GridConfig
    alpha: List[float]
    gamma: List[float]
    num_trials: int
    noiseless: bool
    dump_tensor: bool


@dataclass
class SolveConfig(CommonConfig):
    mode: str  # snr or gamma
    vary: str  # beta1 or beta2 (snr mode)
    fixed_beta: float
    snr: GridConfig
    beta1: float
    beta2: float
    alpha: List[float]
    gamma: GridConfig
    initializer: str  # simulated or analytic
    sim_p: int
    num_trials: int


@dataclass
class EstimateConfig(CommonConfig):
    p: int
    beta1: GridConfig
    beta2: GridConfig
    alpha: List[float]
    num_trials: int
    roundtrip: bool


@dataclass
class ImproveConfig(CommonConfig):
    p: int
    beta1: float
    beta2: float
    alpha: List[float]
    eps_step: float
    num_trials: int


SCHEMAS = {
    "spectrum": SpectrumConfig,
    "deflate": DeflateConfig,
    "solve": SolveConfig,
    "estimate": EstimateConfig,
    "improve": ImproveConfig,
}


def grid_values(grid: GridConfig) -> list[float]:
    """Inclusive arithmetic grid; step 0 means the single value `start`."""
    if grid.step == 0 or grid.start == grid.stop:
        return [float(grid.start)]
    num = int(round((grid.stop - grid.start) / grid.step)) + 1
    return [float(v) for v in np.round(grid.start + grid.step * np.arange(num), 10)]


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _check_grid(name: str, grid: GridConfig, lo: float, hi: float | None = None):
    _require(grid.step >= 0, f"{name}.step must be >= 0 (specified: {grid.step})")
    _require(grid.stop >= grid.start, f"{name}.stop must be >= {name}.start")
    for v in grid_values(grid):
        _require(v >= lo and (hi is None or v <= hi), f"{name} value {v} outside [{lo}, {hi}]")


def _check_alpha(values):
    for a in values:
        _require(0.0 <= a < 1.0, f"alpha must be in [0, 1) (specified: {a})")


def validate(cfg: CommonConfig):
    """Numeric range checks run before any work starts."""
    _require(cfg.seed >= 0, f"seed must be >= 0 (specified: {cfg.seed})")
    _require(cfg.env.num_workers >= 1, "env.num_workers must be >= 1")
    _require(cfg.scale.name in ("desk", "full"), f"Unknown scale: {cfg.scale.name}")
    _require(cfg.solver.power.tol > 0 and cfg.solver.power.max_iter >= 1, "invalid power settings")
    _require(cfg.solver.newton.tol > 0 and cfg.solver.newton.max_iter >= 1, "invalid newton settings")
    fp = cfg.solver.fixed_point
    _require(
        fp.tol > 0 and fp.max_iter >= 1 and fp.polish_after >= 1, "invalid fixed_point settings"
    )
    _require(fp.density_eps > 0, "fixed_point.density_eps must be positive")

    if hasattr(cfg, "p"):
        _require(cfg.p >= 2, f"p must be >= 2 (specified: {cfg.p})")
    if hasattr(cfg, "num_trials"):
        min_trials = 0 if isinstance(cfg, SolveConfig) else 1
        _require(cfg.num_trials >= min_trials, f"num_trials must be >= {min_trials}")

    match cfg:
        case SpectrumConfig():
            _require(min(cfg.beta1, cfg.beta2) >= 0, "SNRs must be >= 0")
            _check_alpha([cfg.alpha])
            _require(cfg.gamma is None or 0.0 <= cfg.gamma <= 1.0, f"gamma must be in [0, 1] (specified: {cfg.gamma})")
            _require(cfg.bins >= 1 and cfg.grid_points >= 2, "bins >= 1 and grid_points >= 2 required")
            _require(cfg.matrix_input in ("noise", "full"), f"Unknown matrix input: {cfg.matrix_input}")
        case DeflateConfig():
            _check_grid("beta1", cfg.beta1, 0.0)
            _check_grid("beta2", cfg.beta2, 0.0)
            _check_alpha(cfg.alpha)
            for g in cfg.gamma:
                _require(0.0 <= g <= 1.0, f"gamma must be in [0, 1] (specified: {g})")
        case SolveConfig():
            _require(cfg.mode in ("snr", "gamma"), f"Unknown mode: {cfg.mode}")
            _require(cfg.vary in ("beta1", "beta2"), f"Unknown sweep variable: {cfg.vary}")
            _require(cfg.initializer in ("simulated", "analytic"), f"Unknown initializer: {cfg.initializer}")
            _require(min(cfg.fixed_beta, cfg.beta1, cfg.beta2) >= 0, "SNRs must be >= 0")
            _require(cfg.sim_p >= 2, "sim_p must be >= 2")
            _check_grid("snr", cfg.snr, 0.0)
            _check_grid("gamma", cfg.gamma, 0.0, 1.0)
            _check_alpha(cfg.alpha)
        case EstimateConfig():
            _check_grid("beta1", cfg.beta1, 0.0)
            _check_grid("beta2", cfg.beta2, 0.0)
            _check_alpha(cfg.alpha)
        case ImproveConfig():
            _require(min(cfg.beta1, cfg.beta2) >= 0, "SNRs must be >= 0")
            _check_alpha(cfg.alpha)
            _require(0.0 < cfg.eps_step <= 0.2, f"eps_step must be in (0, 0.2] (specified: {cfg.eps_step})")


def load_config(cfg: DictConfig, schema: type) -> CommonConfig:
    """Merge a composed config into its schema (unknown keys and bad types rejected) and validate."""
    try:
        merged = OmegaConf.merge(OmegaConf.structured(schema), cfg)
        typed = OmegaConf.to_object(merged)
    except OmegaConfBaseException as e:
        raise ConfigError(str(e)) from e
    validate(typed)
    return typed
