import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, List, Sequence, Union

import torch

from data_module.grids import interval_grid
from expressions import ExprVec, Number, SymbolTable
from expressions import dual
from geometry.vector_fields import LinearCombinationField, VectorField
from models import ControlSystem
from utils.errors import CannotAchieve, DimensionMismatch, InputError, UnknownSymbol

logger = logging.getLogger(__name__)


class Feedback(ABC):
    """Continuous map x ↦ α(x) closing the loop u = α(x)."""

    def __init__(self, n: int, m: int):
        self._n = n
        self._m = m

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return self._m

    @property
    def differentiable(self) -> bool:
        return False

    @abstractmethod
    def values(self, x: Sequence[Number]) -> List[Number]:
        raise NotImplementedError()

    def __call__(self, x: Sequence[float]) -> torch.Tensor:
        if len(x) != self._n:
            raise DimensionMismatch(f"Feedback on R^{self._n} evaluated at a point of length {len(x)}")
        return torch.tensor([dual.real(v) for v in self.values([float(v) for v in x])], dtype=torch.float64)


class ExprFeedback(Feedback):
    def __init__(self, vector: ExprVec, state_names: Sequence[str]):
        super().__init__(len(state_names), vector.dim)
        for name in vector.free_symbols():
            if name not in state_names:
                raise UnknownSymbol(name)
        self._vector = vector
        self._state_names = tuple(state_names)

    @staticmethod
    def parse(texts: Sequence[str], state_names: Sequence[str]) -> "ExprFeedback":
        return ExprFeedback(ExprVec.parse(texts, SymbolTable(state_names)), state_names)

    @property
    def differentiable(self) -> bool:
        return True

    def values(self, x: Sequence[Number]) -> List[Number]:
        return self._vector.evaluate(dict(zip(self._state_names, x)))

    def __repr__(self) -> str:
        return f"ExprFeedback({self._vector})"


class GridFeedback(Feedback):
    """Multilinear interpolation of values sampled on a tensor grid; constant beyond the grid."""

    def __init__(self, axes: Sequence[torch.Tensor], samples: torch.Tensor):
        """
        :param axes: increasing node coordinates, one tensor per state axis
        :param samples: [nodes on axis 1; ...; nodes on axis n; m]
        """
        axes = [torch.as_tensor(a, dtype=torch.float64) for a in axes]
        samples = torch.as_tensor(samples, dtype=torch.float64)
        if samples.dim() != len(axes) + 1 or list(samples.shape[:-1]) != [len(a) for a in axes]:
            raise DimensionMismatch(f"Samples of shape {tuple(samples.shape)} on a grid of {[len(a) for a in axes]}")
        for axis in axes:
            if len(axis) < 2 or not bool((axis[1:] > axis[:-1]).all()):
                raise InputError("Grid axes need at least two strictly increasing nodes")
        super().__init__(len(axes), samples.shape[-1])
        self.axes = axes
        self.samples = samples

    @staticmethod
    def sample(
        function: Callable[[Sequence[float]], Union[float, Sequence[float]]],
        lower: Sequence[float],
        upper: Sequence[float],
        nodes: int,
    ) -> "GridFeedback":
        axes = [torch.linspace(lo, hi, nodes, dtype=torch.float64) for lo, hi in zip(lower, upper)]
        points = interval_grid(lower, upper, nodes)
        values = []
        for point in points:
            value = function(point)
            values.append([float(value)] if isinstance(value, (int, float)) else [float(v) for v in value])
        samples = torch.tensor(values, dtype=torch.float64).reshape(*[nodes] * len(axes), -1)
        return GridFeedback(axes, samples)

    @property
    def spacing(self) -> float:
        return min((axis[1:] - axis[:-1]).min().item() for axis in self.axes)

    def axis_weights(self, axis: int, value: float) -> torch.Tensor:
        """Hat-function weights of the nodes of one axis at ``value``."""
        nodes = self.axes[axis]
        value = min(max(value, nodes[0].item()), nodes[-1].item())
        right = min(int(torch.searchsorted(nodes, torch.tensor([value], dtype=torch.float64)).item()), len(nodes) - 1)
        right = max(right, 1)
        left = right - 1
        share = (value - nodes[left].item()) / (nodes[right] - nodes[left]).item()
        weights = torch.zeros(len(nodes), dtype=torch.float64)
        weights[left], weights[right] = 1.0 - share, share
        return weights

    def contract(self, weights: Sequence[torch.Tensor]) -> torch.Tensor:
        result = self.samples
        for axis_weights in weights:
            # contract the leading axis each time
            result = torch.tensordot(axis_weights, result, dims=1)
        return result

    def values(self, x: Sequence[Number]) -> List[Number]:
        weights = [self.axis_weights(i, dual.real(v)) for i, v in enumerate(x)]
        return self.contract(weights).tolist()


def bump(t: torch.Tensor) -> torch.Tensor:
    """exp(-1 / (1 - t²)) on (-1, 1), zero elsewhere."""
    inside = t.abs() < 1
    safe = torch.where(inside, t, torch.zeros_like(t))
    return torch.where(inside, torch.exp(-1.0 / (1.0 - safe * safe)), torch.zeros_like(t))


class SmoothedFeedback(Feedback):
    """β(x) = Σ_j h_j(x) α(x_j) with tensorized bump weights normalized over the grid nodes."""

    def __init__(self, base: GridFeedback, width: float):
        if width < base.spacing:
            raise CannotAchieve(f"Kernel width {width} is below the grid spacing {base.spacing}")
        super().__init__(base.n, base.m)
        self.base = base
        self.width = width

    def values(self, x: Sequence[Number]) -> List[Number]:
        weights = []
        for axis, value in zip(self.base.axes, x):
            raw = bump((axis - dual.real(value)) / self.width)
            total = raw.sum()
            if total == 0:
                raise CannotAchieve(f"No grid node within {self.width} of {dual.real(value)}")
            weights.append(raw / total)
        return self.base.contract(weights).tolist()


def sup_distance(first: Feedback, second: Feedback, points: Sequence[Sequence[float]]) -> float:
    return max(torch.linalg.norm(first(p) - second(p), ord=math.inf).item() for p in points)


def check_points(base: GridFeedback, density: int) -> List[List[float]]:
    lower = [axis[0].item() for axis in base.axes]
    upper = [axis[-1].item() for axis in base.axes]
    return interval_grid(lower, upper, density * (len(base.axes[0]) - 1) + 1)


def smooth_feedback(alpha: Feedback, eps: float, kernel_width: float = 0.5, check_density: int = 10) -> Feedback:
    """Smooth feedback within ``eps`` of ``alpha`` on a grid ``check_density`` times denser than its nodes.

    Expression feedbacks are already smooth and are returned unchanged. For a grid feedback the
    kernel width is halved until the dense-grid error drops below ``eps``.
    """
    if eps <= 0:
        raise InputError(f"Tolerance must be positive, got {eps}")
    if alpha.differentiable:
        return alpha
    if not isinstance(alpha, GridFeedback):
        raise InputError(f"Only grid-sampled feedbacks can be smoothed, got {type(alpha).__name__}")
    points = check_points(alpha, check_density)
    width = kernel_width
    while width >= alpha.spacing:
        smoothed = SmoothedFeedback(alpha, width)
        error = sup_distance(alpha, smoothed, points)
        logger.debug(f"Kernel width {width:.4g}: sup error {error:.4g}")
        if error < eps:
            return smoothed
        width /= 2
    raise CannotAchieve(f"Grid spacing {alpha.spacing:.4g} is too coarse to approximate within {eps}")


class ClosedLoopField(VectorField):
    """f_α(x) = f(x, α(x))"""

    def __init__(self, system: ControlSystem, alpha: Feedback):
        if alpha.n != system.n or alpha.m != system.m:
            raise DimensionMismatch(f"Feedback R^{alpha.n} -> R^{alpha.m} for a system with n={system.n}, m={system.m}")
        super().__init__(system.n)
        self._system = system
        self._alpha = alpha

    @property
    def differentiable(self) -> bool:
        return self._alpha.differentiable

    def values(self, point: Sequence[Number]) -> List[Number]:
        if not self.differentiable:
            point = [dual.real(p) for p in point]
        return self._system.evaluate(list(point), self._alpha.values(point))


def closed_loop_field(system: ControlSystem, alpha: Feedback) -> VectorField:
    return ClosedLoopField(system, alpha)


def difference_field(system: ControlSystem, first: Feedback, second: Feedback) -> VectorField:
    """δf(x) = f(x, α1(x)) - f(x, α2(x))"""
    return LinearCombinationField([closed_loop_field(system, first), closed_loop_field(system, second)], [1.0, -1.0])


def constant_feedback(values: Sequence[float], state_names: Sequence[str]) -> ExprFeedback:
    return ExprFeedback.parse([repr(float(v)) for v in values], state_names)
