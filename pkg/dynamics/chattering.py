import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import torch

from dynamics.integrator import solve
from geometry.vector_fields import LinearCombinationField, VectorField
from models import Trajectory
from utils.errors import BoxExit, DimensionMismatch, InputError

logger = logging.getLogger(__name__)


@dataclass
class ChatteringResult:
    switched: Trajectory
    averaged: Trajectory
    sup_error: float
    dt: float

    def to_dict(self) -> Dict:
        return {
            "sup_error": self.sup_error,
            "dt": self.dt,
            "samples": len(self.switched),
            "switched_final": self.switched.final_state.tolist(),
            "averaged_final": self.averaged.final_state.tolist(),
        }


def aligned_step(half_period: float, dt: float) -> Tuple[int, float]:
    """Steps per half period and the step that puts every switch on the grid."""
    steps = max(1, math.ceil(half_period / dt - 1e-9))
    return steps, half_period / steps


def _trajectory(times: torch.Tensor, states: torch.Tensor) -> Trajectory:
    names = [f"x{i + 1}" for i in range(states.shape[1])]
    return Trajectory(times, states, torch.zeros((len(times), 0), dtype=torch.float64), names, [])


def chattering(
    first: VectorField,
    second: VectorField,
    x0: Sequence[float],
    l: int,
    t_span: Tuple[float, float] = (0.0, 1.0),
    dt: float = 1e-3,
    inside: Optional[Callable[[Sequence[float]], bool]] = None,
) -> ChatteringResult:
    """Switched flow G_ℓ against the averaged flow of (X1 + X2) / 2 from the same point.

    [t0, t1] is cut into ℓ equal pieces; G_ℓ follows X1 on the first half of each piece and X2 on the
    second. The step is shrunk so that every switch falls on the integration grid.
    """
    if l < 1:
        raise InputError(f"Number of switching periods must be positive, got {l}")
    if first.dim != second.dim or len(x0) != first.dim:
        raise DimensionMismatch(f"Fields on R^{first.dim} and R^{second.dim} from a point of R^{len(x0)}")
    t0, t1 = t_span
    half_period = (t1 - t0) / (2 * l)
    steps, step = aligned_step(half_period, dt)

    times = [torch.tensor([t0], dtype=torch.float64)]
    states = [torch.as_tensor(x0, dtype=torch.float64).unsqueeze(0)]
    for piece in range(2 * l):
        field = first if piece % 2 == 0 else second
        start = t0 + piece * half_period
        piece_times, piece_states, exited = solve(
            lambda t, y, field=field: field(y.tolist()), states[-1][-1], start, half_period, step, inside
        )
        times.append(piece_times[1:])
        states.append(piece_states[1:])
        if exited:
            raise BoxExit(f"Switched trajectory left the domain box after t={piece_times[-1].item():.6g}")
    switched = _trajectory(torch.cat(times), torch.cat(states))

    average = LinearCombinationField([first, second], [0.5, 0.5])
    average_times, average_states, exited = solve(
        lambda t, y: average(y.tolist()), x0, t0, t1 - t0, step, inside
    )
    if exited:
        raise BoxExit(f"Averaged trajectory left the domain box after t={average_times[-1].item():.6g}")
    averaged = _trajectory(average_times, average_states)

    sup_error = torch.linalg.norm(switched.states - averaged.states, dim=1).max().item()
    logger.debug(f"Chattering with l={l}, dt={step:.3g}: sup error {sup_error:.6g}")
    return ChatteringResult(switched, averaged, sup_error, step)
