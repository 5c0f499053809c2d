"""Fixed-step classical Runge-Kutta integration.

Controls may jump at grid points. Stage evaluations at the two ends of a step are therefore taken
one ulp inside the step, so a piecewise continuous control is always sampled on the piece the
step belongs to.
"""
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple, Union

import torch

from dynamics.feedback import Feedback
from geometry.vector_fields import VectorField
from models import ControlSystem, Trajectory
from utils.errors import BoxExit, DimensionMismatch, InputError

logger = logging.getLogger(__name__)

Rhs = Callable[[float, torch.Tensor], torch.Tensor]
TimeControl = Callable[[float], Union[float, Sequence[float]]]
Control = Union[TimeControl, Feedback]


def step_count(duration: float, dt: float) -> int:
    if dt <= 0 or not math.isfinite(dt):
        raise InputError(f"Time step must be positive, got {dt}")
    return max(1, math.ceil(abs(duration) / dt - 1e-9))


def rk4_step(rhs: Rhs, t: float, x: torch.Tensor, h: float) -> torch.Tensor:
    t_next = t + h
    k1 = rhs(math.nextafter(t, t_next), x)
    k2 = rhs(t + h / 2, x + h / 2 * k1)
    k3 = rhs(t + h / 2, x + h / 2 * k2)
    k4 = rhs(math.nextafter(t_next, t), x + h * k3)
    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def solve(
    rhs: Rhs,
    x0: Sequence[float],
    t0: float,
    duration: float,
    dt: float,
    inside: Optional[Callable[[Sequence[float]], bool]] = None,
) -> Tuple[torch.Tensor, torch.Tensor, bool]:
    """Integrate ẋ = rhs(t, x) over [t0, t0 + duration]; negative durations integrate backwards.

    The step is shrunk to duration / N so the grid ends exactly at t0 + duration. Integration
    stops at the first state outside ``inside``; that state is not recorded.
    :return: times [N + 1], states [N + 1; d] and whether integration stopped early
    """
    state = torch.as_tensor(x0, dtype=torch.float64).clone()
    if duration == 0:
        return torch.tensor([t0], dtype=torch.float64), state.unsqueeze(0), False
    steps = step_count(duration, dt)
    h = duration / steps
    times: List[float] = [t0]
    states: List[torch.Tensor] = [state]
    for i in range(steps):
        t = t0 + i * h
        state = rk4_step(rhs, t, state, h)
        if not bool(torch.isfinite(state).all()):
            raise BoxExit(f"State became non-finite at t={t + h}")
        if inside is not None and not inside(state.tolist()):
            logger.debug(f"Left the domain box at t={t + h}")
            return torch.tensor(times, dtype=torch.float64), torch.stack(states), True
        times.append(t0 + (i + 1) * h)
        states.append(state)
    return torch.tensor(times, dtype=torch.float64), torch.stack(states), False


def control_function(system: ControlSystem, control: Control) -> Callable[[float, torch.Tensor], List[float]]:
    """Uniform (t, x) ↦ u view of a time-dependent control or a feedback."""
    if isinstance(control, Feedback):
        if control.m != system.m:
            raise DimensionMismatch(f"Feedback with {control.m} outputs for a system with {system.m} controls")
        return lambda t, x: control(x.tolist()).tolist()

    def evaluate(t: float, x: torch.Tensor) -> List[float]:
        value = control(t)
        values = [float(value)] if isinstance(value, (int, float)) else [float(v) for v in value]
        if len(values) != system.m:
            raise DimensionMismatch(f"Control returned {len(values)} values for {system.m} controls")
        return values

    return evaluate


def integrate(
    system: ControlSystem,
    x0: Sequence[float],
    control: Control,
    t_span: Tuple[float, float] = (0.0, 1.0),
    dt: float = 1e-3,
) -> Trajectory:
    """RK4 trajectory of ẋ = f(x, u) under a time control u(t) or a feedback u = α(x).

    Raises BoxExit, carrying the part of the trajectory inside the box, when the state leaves it.
    """
    if not system.state_in_box(x0):
        raise InputError(f"Initial state {list(x0)} is outside the domain box")
    t0, t1 = t_span
    if t1 <= t0:
        raise InputError(f"Empty time span [{t0}, {t1}]")
    control_at = control_function(system, control)

    def rhs(t: float, x: torch.Tensor) -> torch.Tensor:
        return system.evaluate_tensor(x.tolist(), control_at(t, x))

    times, states, exited = solve(rhs, x0, t0, t1 - t0, dt, system.state_in_box)
    controls = torch.tensor([control_at(t, x) for t, x in zip(times.tolist(), states)], dtype=torch.float64)
    trajectory = Trajectory(
        times,
        states.reshape(len(times), system.n),
        controls.reshape(len(times), system.m),
        system.states,
        system.controls,
        exited,
    )
    if exited:
        raise BoxExit(f"Trajectory of {system.name} left the domain box after t={times[-1].item():.6g}", trajectory)
    return trajectory


def flow(
    field: VectorField,
    x: Sequence[float],
    time: float,
    dt: float = 1e-2,
    inside: Optional[Callable[[Sequence[float]], bool]] = None,
) -> torch.Tensor:
    """Point reached from ``x`` along the flow of ``field`` after ``time`` (negative goes backwards)."""
    _, states, exited = solve(lambda t, y: field(y.tolist()), x, 0.0, time, dt, inside)
    if exited:
        raise BoxExit(f"Flow of {field!r} for time {time} left the domain box")
    return states[-1]
