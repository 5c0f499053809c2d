import itertools
import math
from typing import List, Optional, Sequence, Tuple

import torch

from models import ControlSystem
from utils.errors import InputError


def axis_nodes(center: float, half_width: float, count: int) -> List[float]:
    if count < 1:
        raise InputError(f"Grid needs at least one point per axis, got {count}")
    if count == 1:
        return [center]
    return torch.linspace(center - half_width, center + half_width, count, dtype=torch.float64).tolist()


def cube_grid(center: Sequence[float], half_widths: Sequence[float], count: int) -> List[List[float]]:
    """Tensor grid with ``count`` nodes per axis on the cube ``center ± half_widths``."""
    axes = [axis_nodes(c, h, count) for c, h in zip(center, half_widths)]
    return [list(point) for point in itertools.product(*axes)]


def neighbourhood_grid(
    system: ControlSystem, names: Sequence[str], center: Sequence[float], radius: float, count: int
) -> List[List[float]]:
    """Grid on the cube of box-normalized half-width ``radius`` around ``center`` over the axes ``names``.

    Raises InputError when the cube leaves the domain box.
    """
    half_widths = (radius * system.scales(names)).tolist()
    lower, upper = system.bounds(names)
    for name, c, h, lo, hi in zip(names, center, half_widths, lower.tolist(), upper.tolist()):
        if c - h < lo or c + h > hi:
            raise InputError(f"Neighbourhood [{c - h}, {c + h}] of {name} leaves the domain box [{lo}, {hi}]")
    return cube_grid(center, half_widths, count)


def box_interval(lo: float, hi: float) -> Tuple[float, float]:
    """Finite stand-in for a box interval: unbounded sides are replaced by a width-2 extension of the finite one."""
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    if math.isfinite(lo):
        return lo, lo + 2.0
    if math.isfinite(hi):
        return hi - 2.0, hi
    return -1.0, 1.0


def capped_count(count: int, dims: int, max_samples: Optional[int] = None) -> int:
    """Nodes per axis such that a tensor grid over ``dims`` axes has at most ``max_samples`` points (at least 2)."""
    if max_samples is None or dims == 0:
        return count
    per_axis = int(max_samples ** (1.0 / dims) + 1e-9)
    return max(2, min(count, per_axis))


def box_grid(system: ControlSystem, names: Sequence[str], count: int) -> List[List[float]]:
    """Grid spanning the domain box over ``names``; unbounded sides are replaced as in ``box_interval``."""
    axes = []
    for name in names:
        lo, hi = box_interval(*system.box[name])
        axes.append(axis_nodes((lo + hi) / 2, (hi - lo) / 2, count))
    return [list(point) for point in itertools.product(*axes)]


def interval_grid(lower: Sequence[float], upper: Sequence[float], count: int) -> List[List[float]]:
    """Tensor grid with ``count`` nodes per axis on the box [lower, upper]."""
    centers = [(lo + hi) / 2 for lo, hi in zip(lower, upper)]
    return cube_grid(centers, [(hi - lo) / 2 for lo, hi in zip(lower, upper)], count)
