"""Flag of distributions Δ_0 ⊂ Δ_1 ⊂ ... ⊂ Δ_{n-1} with Δ_{k+1} = Δ_k + [f_ū, Δ_k].

Δ_0 is spanned by the columns of ∂f/∂u(·, ū) when the rank of ∂f/∂u is locally constant, and by
limit directions frozen at x̄ otherwise. Every level is sampled on a state grid around x̄: its rank,
the constancy of that rank and closure of its generators under brackets.
"""
import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

import torch
from tqdm import tqdm

from data_module.grids import neighbourhood_grid
from geometry.classification import PointClass, classify_point
from geometry.limit_directions import estimate_D
from geometry.parameters import VerdictParameters
from geometry.vector_fields import (
    BracketField,
    ConstantField,
    ControlColumnField,
    VectorField,
    drift_field,
    lie_bracket,
)
from models import ControlSystem
from numlin import Subspace, is_rank_robust, numerical_rank, span, subspace_distance
from utils.errors import NonConstantD
from utils.metrics import SampleStatistic

logger = logging.getLogger(__name__)

JACOBIAN_BASIS = "jacobian_columns"
LIMIT_DIRECTION_BASIS = "limit_directions"

T = TypeVar("T")


@dataclass
class FlagLevel:
    level: int
    n_fields: int
    rank_at_point: int
    min_rank: int
    max_rank: int
    rank_constant: bool
    rank_robust: bool
    involutive: bool
    worst_residual: float
    involutivity_robust_failure: bool

    def to_dict(self) -> Dict:
        return {
            "level": self.level,
            "n_fields": self.n_fields,
            "rank_at_point": self.rank_at_point,
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "rank_constant": self.rank_constant,
            "rank_robust": self.rank_robust,
            "involutive": self.involutive,
            "worst_residual": self.worst_residual,
            "involutivity_robust_failure": self.involutivity_robust_failure,
        }


@dataclass
class FibrationCheck:
    sup_rank: int
    r1: int
    fiber_dimension_ok: bool
    min_extent: float
    open_image: bool
    robust_failure: bool

    @property
    def passed(self) -> bool:
        return self.fiber_dimension_ok and self.open_image

    def to_dict(self) -> Dict:
        return {
            "sup_rank": self.sup_rank,
            "r1": self.r1,
            "fiber_dimension_ok": self.fiber_dimension_ok,
            "min_extent": self.min_extent,
            "open_image": self.open_image,
            "robust_failure": self.robust_failure,
            "passed": self.passed,
        }


@dataclass
class FlagReport:
    point_class: PointClass
    basis_source: str
    d0: Subspace
    levels: List[FlagLevel]
    condition1: bool
    condition1_distance: float
    condition1_robust_failure: bool
    condition3: bool
    condition3_robust_failure: bool
    state_samples: int
    caveats: List[str] = field(default_factory=list)
    surrogate: Optional[FibrationCheck] = None
    tag: Optional[str] = None
    linear_approximation_controllable: Optional[bool] = None

    @property
    def condition2(self) -> bool:
        return self.point_class.regular

    @property
    def condition2_robust_failure(self) -> bool:
        return not self.point_class.regular and self.point_class.robust

    @property
    def ranks(self) -> List[int]:
        return [level.rank_at_point for level in self.levels]

    def to_dict(self) -> Dict:
        return {
            "tag": self.tag,
            "point_class": self.point_class.to_dict(),
            "basis_source": self.basis_source,
            "d0": self.d0.to_dict(),
            "levels": [level.to_dict() for level in self.levels],
            "condition1": self.condition1,
            "condition1_distance": self.condition1_distance,
            "condition1_robust_failure": self.condition1_robust_failure,
            "condition2": self.condition2,
            "condition2_robust_failure": self.condition2_robust_failure,
            "condition3": self.condition3,
            "condition3_robust_failure": self.condition3_robust_failure,
            "fibration_surrogate": None if self.surrogate is None else self.surrogate.to_dict(),
            "linear_approximation_controllable": self.linear_approximation_controllable,
            "state_samples": self.state_samples,
            "caveats": self.caveats,
        }


def record_warnings(call: Callable[[], T], caveats: List[str]) -> T:
    """Run ``call``, keeping the text of every warning it emits and re-emitting it."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = call()
    for warning in caught:
        caveats.append(f"{warning.category.__name__}: {warning.message}")
        warnings.warn(warning.message, warning.category)
    return result


def select_independent(vectors: Sequence[torch.Tensor], rel_tol: float) -> List[int]:
    """Indices of a greedily chosen maximal independent subset, in order."""
    chosen: List[int] = []
    for i, vector in enumerate(vectors):
        candidate = [vectors[j] for j in chosen] + [vector]
        if numerical_rank(torch.stack(candidate, dim=1), rel_tol) > len(chosen):
            chosen.append(i)
    return chosen


def field_matrix(fields: Sequence[VectorField], point: Sequence[float], dim: int) -> torch.Tensor:
    """:return: [dim; number of fields]"""
    if len(fields) == 0:
        return torch.zeros((dim, 0), dtype=torch.float64)
    return torch.stack([f(point) for f in fields], dim=1)


def involutivity_residual(
    fields: Sequence[VectorField], values: torch.Tensor, point: Sequence[float], rel_tol: float, fd_step: float
) -> float:
    """Worst residual of pairwise brackets against the span of ``values``, scaled by 1 + the field norms."""
    subspace = span([values[:, j] for j in range(values.shape[1])], rel_tol, ambient_dim=values.shape[0])
    worst = 0.0
    for i in range(len(fields)):
        for j in range(i + 1, len(fields)):
            bracket = lie_bracket(fields[i], fields[j], point, fd_step)
            scale = 1.0 + torch.linalg.norm(fields[i](point)).item() + torch.linalg.norm(fields[j](point)).item()
            worst = max(worst, subspace.residual(bracket) / scale)
    return worst


def _evaluate_level(
    level: int,
    fields: List[VectorField],
    x: Sequence[float],
    state_grid: List[List[float]],
    dim: int,
    params: VerdictParameters,
) -> FlagLevel:
    at_point = field_matrix(fields, x, dim)
    rank_at_point = numerical_rank(at_point, params.tol)
    generators = [fields[i] for i in select_independent([at_point[:, j] for j in range(at_point.shape[1])], params.tol)]

    statistic = SampleStatistic()
    for point in tqdm(state_grid, desc=f"level {level}", disable=not params.progress):
        values = field_matrix(fields, point, dim)
        rank = numerical_rank(values, params.tol)
        residual = 0.0
        if rank < dim:
            residual = involutivity_residual(generators, values, point, params.tol, params.fd_step)
        statistic.update_statistic(
            rank=rank,
            residual=residual,
            passed=residual <= params.involutivity_tol,
            robust=is_rank_robust(values, params.tol, params.hysteresis),
        )
    rank_constant = statistic.rank_constant and statistic.min_rank == rank_at_point
    return FlagLevel(
        level=level,
        n_fields=len(fields),
        rank_at_point=rank_at_point,
        min_rank=min(statistic.min_rank, rank_at_point),
        max_rank=max(statistic.max_rank, rank_at_point),
        rank_constant=rank_constant,
        rank_robust=statistic.all_robust,
        involutive=statistic.all_passed,
        worst_residual=statistic.worst_residual,
        involutivity_robust_failure=statistic.worst_residual > params.hysteresis * params.involutivity_tol,
    )


def limit_span(
    system: ControlSystem, x: Sequence[float], u: Sequence[float], params: VerdictParameters, caveats: List[str]
) -> Subspace:
    return record_warnings(
        lambda: estimate_D(
            system, x, u, params.n_directions, params.radius_schedule, params.limit_tol, params.angular_tol, params.seed
        ),
        caveats,
    )


def d_variation(
    system: ControlSystem,
    u: Sequence[float],
    state_grid: List[List[float]],
    params: VerdictParameters,
    caveats: List[str],
) -> float:
    """Largest principal angle between D(x, u) and D(x, ū) over the state grid and a control grid around ū."""
    control_grid = neighbourhood_grid(system, system.controls, u, params.radius, min(params.grid, params.control_grid))

    worst = 0.0
    for x in tqdm(state_grid, desc="D(x, u)", disable=not params.progress):
        reference = limit_span(system, x, u, params, caveats)
        for w in control_grid:
            worst = max(worst, subspace_distance(limit_span(system, x, w, params, caveats), reference))
    return worst


def build_flag(
    system: ControlSystem,
    x: Sequence[float],
    u: Sequence[float],
    state_grid: Optional[List[List[float]]] = None,
    params: VerdictParameters = VerdictParameters(),
    point_class: Optional[PointClass] = None,
) -> FlagReport:
    x, u = [float(v) for v in x], [float(v) for v in u]
    n = system.n
    caveats: List[str] = []
    if point_class is None:
        point_class = classify_point(
            system, x, u, params.radius, params.grid, params.tol, params.hysteresis, params.progress
        )
    if state_grid is None:
        state_grid = neighbourhood_grid(system, system.states, x, params.radius, params.state_grid)

    d0 = limit_span(system, x, u, params, caveats)
    basis: List[VectorField]
    if point_class.regular:
        jacobian = system.control_jacobian(x, u)
        columns = select_independent([jacobian[:, j] for j in range(system.m)], params.tol)
        basis = [ControlColumnField(system, u, j) for j in columns]
        basis_source = JACOBIAN_BASIS
    else:
        basis = [ConstantField(d0.basis[:, j].tolist()) for j in range(d0.dim)]
        basis_source = LIMIT_DIRECTION_BASIS
    logger.debug(f"Δ_0 spanned by {len(basis)} fields from {basis_source}")

    drift = drift_field(system, u)
    fields, newest = list(basis), list(basis)
    levels: List[FlagLevel] = []
    for k in range(n):
        if levels and levels[-1].min_rank == n:
            # once Δ_k is everything at every sample, so are the higher levels
            levels.append(replace(levels[-1], level=k))
            continue
        if k > 0:
            newest = [BracketField(drift, field_, params.fd_step) for field_ in newest]
            fields = fields + newest
        levels.append(_evaluate_level(k, fields, x, state_grid, n, params))

    distance = d_variation(system, u, state_grid, params, caveats)
    condition1 = distance <= params.angular_tol
    if not condition1:
        message = f"D(x, u) moves by {distance:.3g} rad as u varies around {u}"
        caveats.append(f"{NonConstantD.__name__}: {message}")
        warnings.warn(message, NonConstantD)

    last = levels[-1]
    condition3 = all(level.rank_constant and level.involutive for level in levels) and last.min_rank == n
    condition3_robust_failure = (
        any(not level.rank_constant and level.rank_robust for level in levels)
        or any(level.involutivity_robust_failure for level in levels)
        or (last.max_rank < n and last.rank_robust)
    )
    return FlagReport(
        point_class=point_class,
        basis_source=basis_source,
        d0=d0,
        levels=levels,
        condition1=condition1,
        condition1_distance=distance,
        condition1_robust_failure=distance > params.hysteresis * params.angular_tol,
        condition3=condition3,
        condition3_robust_failure=condition3_robust_failure,
        state_samples=len(state_grid),
        caveats=caveats,
    )
