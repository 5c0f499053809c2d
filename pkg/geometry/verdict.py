import logging
from typing import List, Sequence

import torch

from data_module.grids import neighbourhood_grid
from geometry.flag import FibrationCheck, FlagReport, build_flag
from geometry.limit_directions import probe_directions
from geometry.parameters import VerdictParameters
from linear_systems import kalman_controllable
from models import ControlSystem
from numlin import Subspace

logger = logging.getLogger(__name__)

SMOOTH_LINEARIZABLE = "SmoothLinearizable"
QUASI_SMOOTH_CANDIDATE = "QuasiSmoothCandidate"
NOT_LINEARIZABLE = "NotLinearizable"
INCONCLUSIVE = "Inconclusive"


def fibration_surrogate(
    system: ControlSystem,
    x: Sequence[float],
    u: Sequence[float],
    d0: Subspace,
    sup_rank: int,
    state_grid: List[List[float]],
    params: VerdictParameters,
) -> FibrationCheck:
    """Sampled stand-in for (x, u) ↦ (x, f(x, u)) being a fibration with fiber R^{m - r1} near (x̄, ū).

    Fibers have the right dimension when the sampled rank of ∂f/∂u reaches r1 = dim D(x̄, ū). The
    image is open when, for every sampled x, the images f(x, w) - f(x, ū) of a control grid around
    ū reach beyond ±δ along every probed direction of D(x̄, ū).
    """
    r1 = d0.dim
    fiber_dimension_ok = sup_rank == r1
    if r1 == 0:
        return FibrationCheck(sup_rank, r1, fiber_dimension_ok, 0.0, True, False)

    control_grid = neighbourhood_grid(system, system.controls, u, params.radius, params.grid)
    directions = torch.stack(probe_directions(r1, params.n_directions, params.seed), dim=1)  # [r1; directions]
    min_extent = float("inf")
    for state in state_grid:
        reference = system.evaluate_tensor(state, u)
        # [controls; r1] coordinates of the image slice in the basis of D(x̄, ū)
        coordinates = torch.stack([d0.basis.T @ (system.evaluate_tensor(state, w) - reference) for w in control_grid])
        extents = (coordinates @ directions).max(dim=0).values
        scale = max(1.0, torch.linalg.norm(coordinates, dim=1).max().item())
        min_extent = min(min_extent, (extents / scale).min().item())
    open_image = min_extent > params.limit_tol
    # an image that cannot move at all along some direction is not open whatever the tolerance
    robust_failure = min_extent <= 0.0 or sup_rank > r1
    logger.debug(f"Fibration surrogate: sup rank {sup_rank}, r1 {r1}, min extent {min_extent:.3g}")
    return FibrationCheck(sup_rank, r1, fiber_dimension_ok, min_extent, open_image, robust_failure)


def is_equilibrium(system: ControlSystem, x: Sequence[float], u: Sequence[float], rel_tol: float) -> bool:
    return torch.linalg.norm(system.evaluate_tensor(x, u)).item() <= rel_tol


def linearizability_verdict(
    system: ControlSystem, x: Sequence[float], u: Sequence[float], params: VerdictParameters = VerdictParameters()
) -> FlagReport:
    x, u = [float(v) for v in x], [float(v) for v in u]
    state_grid = neighbourhood_grid(system, system.states, x, params.radius, params.state_grid)
    report = build_flag(system, x, u, state_grid, params)
    report.surrogate = fibration_surrogate(
        system, x, u, report.d0, report.point_class.sup_rank_nbhd, state_grid, params
    )

    necessary_failed = report.condition1_robust_failure or report.condition3_robust_failure
    if report.condition1 and report.condition2 and report.condition3:
        report.tag = SMOOTH_LINEARIZABLE
    elif report.condition1 and report.condition3 and not report.condition2 and report.surrogate.passed:
        report.tag = QUASI_SMOOTH_CANDIDATE
    elif necessary_failed or (report.condition2_robust_failure and report.surrogate.robust_failure):
        report.tag = NOT_LINEARIZABLE
    else:
        report.tag = INCONCLUSIVE

    if report.tag == SMOOTH_LINEARIZABLE and is_equilibrium(system, x, u, params.limit_tol):
        _, controllable = kalman_controllable(system.linear_approximation(x, u), params.tol)
        report.linear_approximation_controllable = controllable
        if not controllable:
            logger.warning(f"Smooth verdict at {x}, {u} but the linear approximation is not controllable")
    logger.info(f"Verdict at x={x}, u={u}: {report.tag}")
    return report
