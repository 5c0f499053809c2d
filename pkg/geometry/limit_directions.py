import logging
import math
import warnings
from typing import List, Optional, Sequence

import torch

from models import ControlSystem
from numlin import DEFAULT_TOL, Subspace, column_span, span
from utils.common import make_generator
from utils.errors import DegenerateMap, InputError

logger = logging.getLogger(__name__)

DEFAULT_RADIUS_SCHEDULE = (1e-2, 1e-3, 1e-4, 1e-5)
DEFAULT_LIMIT_TOL = 1e-6


def probe_directions(m: int, n_directions: int = 16, seed: int = 42) -> List[torch.Tensor]:
    """Unit directions in control space: ±e_i first, then seeded random ones."""
    if m == 1:
        return [torch.ones(1, dtype=torch.float64), -torch.ones(1, dtype=torch.float64)]
    directions = []
    for i in range(m):
        basis = torch.zeros(m, dtype=torch.float64)
        basis[i] = 1.0
        directions += [basis, -basis]
    generator = make_generator(seed)
    while len(directions) < n_directions:
        candidate = torch.randn(m, generator=generator, dtype=torch.float64)
        directions.append(candidate / torch.linalg.norm(candidate))
    return directions


def line_angle(first: torch.Tensor, second: torch.Tensor) -> float:
    """Angle between the lines spanned by two unit vectors."""
    cosine = min(abs(torch.dot(first, second).item()), 1.0)
    return math.acos(cosine)


def limit_direction(
    system: ControlSystem,
    x: Sequence[float],
    u: Sequence[float],
    direction: torch.Tensor,
    radius_schedule: Sequence[float] = DEFAULT_RADIUS_SCHEDULE,
    angular_tol: float = 1e-3,
) -> Optional[torch.Tensor]:
    """Limit of the normalized secants (f(x, u + r·d) - f(x, u)) / ‖·‖ as r shrinks along the schedule.

    Returns None when f(x, ·) does not move along ``direction`` or the secant directions did not
    settle within ``angular_tol`` at the two smallest radii.
    """
    base = system.evaluate_tensor(x, u)
    center = torch.as_tensor(u, dtype=torch.float64)
    radii, secants = [], []
    for radius in radius_schedule:
        difference = system.evaluate_tensor(x, (center + radius * direction).tolist()) - base
        norm = torch.linalg.norm(difference)
        if norm == 0:
            continue
        radii.append(radius)
        secants.append(difference / norm)
    if len(secants) < 2:
        return None
    if line_angle(secants[-1], secants[-2]) > angular_tol:
        return None
    # linear extrapolation of the secant direction to r = 0
    previous_radius, last_radius = radii[-2], radii[-1]
    limit = secants[-1] + (secants[-1] - secants[-2]) * last_radius / (previous_radius - last_radius)
    return limit / torch.linalg.norm(limit)


def estimate_D(
    system: ControlSystem,
    x: Sequence[float],
    u: Sequence[float],
    n_directions: int = 16,
    radius_schedule: Sequence[float] = DEFAULT_RADIUS_SCHEDULE,
    rel_tol: float = DEFAULT_LIMIT_TOL,
    angular_tol: float = 1e-3,
    seed: int = 42,
) -> Subspace:
    """Span of the limit directions of secants of u ↦ f(x, u) at u.

    The span is cut at ``rel_tol`` (``limit_tol`` in the configuration), not at the rank tolerance ``DEFAULT_TOL``
    used for Jacobians and brackets: a limit direction is extrapolated from secants on the smallest radii and is
    only accurate to about the square of the last radius, so a tighter cut would count that error as a direction.
    """
    decreasing = all(b < a for a, b in zip(radius_schedule, radius_schedule[1:]))
    if len(radius_schedule) < 2 or not decreasing or radius_schedule[-1] <= 0:
        raise InputError(f"Radius schedule must be positive and strictly decreasing, got {list(radius_schedule)}")
    if system.m == 0:
        return span([], rel_tol, ambient_dim=system.n)
    limits = []
    for direction in probe_directions(system.m, n_directions, seed):
        limit = limit_direction(system, x, u, direction, radius_schedule, angular_tol)
        if limit is not None:
            limits.append(limit)
    logger.debug(f"{len(limits)} limit directions at x={list(x)}, u={list(u)}")
    if len(limits) == 0:
        warnings.warn(f"f(x, .) is constant on all sampled spheres at x={list(x)}, u={list(u)}", DegenerateMap)
        return span([], rel_tol, ambient_dim=system.n)
    return span(limits, rel_tol, ambient_dim=system.n)


def jacobian_range(
    system: ControlSystem, x: Sequence[float], u: Sequence[float], rel_tol: float = DEFAULT_TOL
) -> Subspace:
    """Ran ∂f/∂u (x, u)"""
    return column_span(system.control_jacobian(x, u), rel_tol)
