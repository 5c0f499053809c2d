"""Flow compositions of vector-field families and the orbit they sweep through a point."""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import torch
from tqdm.auto import tqdm

from dynamics.feedback import ExprFeedback, constant_feedback, difference_field
from dynamics.integrator import flow
from geometry.vector_fields import VectorField, drift_field
from models import ControlSystem
from numlin import numerical_rank
from utils.errors import DimensionMismatch, InputError

logger = logging.getLogger(__name__)

DEFAULT_PROBE_TIMES = (0.05, 0.1)


@dataclass
class FlowComposition:
    """X¹_{t₁} ∘ X²_{t₂} ∘ ⋯ ∘ X^N_{t_N}: the last segment acts first."""

    segments: List[Tuple[VectorField, float]]
    dt: float = 1e-2
    inside: Optional[Callable[[Sequence[float]], bool]] = field(default=None, repr=False)

    def __post_init__(self):
        if len({f.dim for f, _ in self.segments}) > 1:
            raise DimensionMismatch("Composed flows must share one state dimension")

    def apply(self, point: Sequence[float]) -> torch.Tensor:
        state = torch.as_tensor(point, dtype=torch.float64)
        for vector_field, time in reversed(self.segments):
            state = flow(vector_field, state.tolist(), time, self.dt, self.inside)
        return state

    def inverse(self) -> "FlowComposition":
        return FlowComposition([(f, -t) for f, t in reversed(self.segments)], self.dt, self.inside)

    def __len__(self) -> int:
        return len(self.segments)


def flow_coords(
    fields: Sequence[VectorField],
    point: Sequence[float],
    xi: Sequence[float],
    dt: float = 1e-2,
    inside: Optional[Callable[[Sequence[float]], bool]] = None,
) -> torch.Tensor:
    """Y¹_{ξ₁}(Y²_{ξ₂}(⋯ Y^d_{ξ_d}(m))): the last field is flowed first."""
    if len(fields) != len(xi):
        raise DimensionMismatch(f"{len(fields)} fields with {len(xi)} times")
    return FlowComposition(list(zip(fields, [float(t) for t in xi])), dt, inside).apply(point)


def pushforward(composition: FlowComposition, vector_field: VectorField, point: Sequence[float], step: float = 1e-5):
    """(Φ_⋆X)(p) = DΦ(Φ⁻¹(p)) X(Φ⁻¹(p)), the derivative taken by central differences along X.
    :return: [dim]
    """
    source = composition.inverse().apply(point)
    direction = vector_field(source.tolist())
    norm = torch.linalg.norm(direction).item()
    if norm == 0:
        return torch.zeros_like(direction)
    h = step / norm
    forward = composition.apply((source + h * direction).tolist())
    backward = composition.apply((source - h * direction).tolist())
    return (forward - backward) / (2 * h)


def compositions(
    family: Sequence[VectorField], depth: int, probe_times: Sequence[float], dt: float = 1e-2, inside=None
) -> List[FlowComposition]:
    """All compositions of exactly ``depth`` flows of the family over times ±probe_times."""
    times = [sign * t for t in probe_times for sign in (1.0, -1.0)]
    segments = [(f, t) for f in family for t in times]
    return [FlowComposition(list(chosen), dt, inside) for chosen in itertools.product(segments, repeat=depth)]


def orbit_dimension(
    family: Sequence[VectorField],
    point: Sequence[float],
    probe_times: Sequence[float] = DEFAULT_PROBE_TIMES,
    rel_tol: float = 1e-6,
    depth: int = 2,
    dt: float = 1e-2,
    inside: Optional[Callable[[Sequence[float]], bool]] = None,
    fd_step: float = 1e-5,
    progress: bool = False,
) -> int:
    """Numerical rank of the family and its pushforwards through compositions of up to ``depth`` flows.

    This bounds the orbit dimension from below; generation stops as soon as the full dimension is reached.
    """
    if len(family) == 0:
        raise InputError("Orbit of an empty family")
    if any(t <= 0 for t in probe_times):
        raise InputError(f"Probe times must be positive, got {list(probe_times)}")
    dim = family[0].dim
    if any(f.dim != dim for f in family) or len(point) != dim:
        raise DimensionMismatch(f"Family and point of length {len(point)} must share one state dimension")

    vectors = [f(point) for f in family]
    rank = numerical_rank(torch.stack(vectors), rel_tol)
    for level in range(1, depth + 1):
        if rank == dim:
            break
        for composition in tqdm(compositions(family, level, probe_times, dt, inside), disable=not progress):
            vectors.extend(pushforward(composition, f, point, fd_step) for f in family)
            rank = numerical_rank(torch.stack(vectors), rel_tol)
            if rank == dim:
                break
        logger.debug(f"Orbit rank {rank} after compositions of depth {level}")
    return rank


def difference_family(system: ControlSystem, u: Sequence[float]) -> List[VectorField]:
    """Difference fields δf between ū and the feedbacks ū ± e_j and ū + x_i e_j."""
    if len(u) != system.m:
        raise DimensionMismatch(f"Control of length {len(u)} for m = {system.m}")
    base = constant_feedback(u, system.states)
    fields: List[VectorField] = []
    for j in range(system.m):
        for sign in (1.0, -1.0):
            moved = [v + sign * (k == j) for k, v in enumerate(u)]
            fields.append(difference_field(system, constant_feedback(moved, system.states), base))
        for name in system.states:
            texts = [f"{float(v)!r} + {name}" if k == j else repr(float(v)) for k, v in enumerate(u)]
            fields.append(difference_field(system, ExprFeedback.parse(texts, system.states), base))
    return fields


def drift_family(system: ControlSystem, u: Sequence[float]) -> List[VectorField]:
    """f_ū together with the difference family at ū."""
    return [drift_field(system, u), *difference_family(system, u)]
