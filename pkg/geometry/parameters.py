from dataclasses import dataclass, field
from typing import Tuple

from omegaconf import DictConfig

from geometry.limit_directions import DEFAULT_LIMIT_TOL, DEFAULT_RADIUS_SCHEDULE


@dataclass(frozen=True)
class VerdictParameters:
    tol: float = 1e-9
    radius: float = 0.1
    grid: int = 5
    state_grid: int = 3
    control_grid: int = 3
    angular_tol: float = 1e-3
    limit_tol: float = DEFAULT_LIMIT_TOL
    radius_schedule: Tuple[float, ...] = field(default=DEFAULT_RADIUS_SCHEDULE)
    n_directions: int = 16
    involutivity_tol: float = 1e-6
    hysteresis: float = 10.0
    fd_step: float = 1e-5
    seed: int = 42
    progress: bool = False

    @staticmethod
    def from_config(config: DictConfig) -> "VerdictParameters":
        return VerdictParameters(
            tol=config.tol,
            radius=config.radius,
            grid=config.grid,
            state_grid=config.state_grid,
            control_grid=config.control_grid,
            angular_tol=config.angular_tol,
            limit_tol=config.limit_tol,
            radius_schedule=tuple(config.radius_schedule),
            n_directions=config.n_directions,
            involutivity_tol=config.involutivity_tol,
            hysteresis=config.hysteresis,
            fd_step=config.fd_step,
            seed=config.seed,
            progress=config.get("progress", False),
        )
