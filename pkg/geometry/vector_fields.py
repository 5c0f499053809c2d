"""Vector fields on the state space.

A field evaluates generically: on float points it returns floats, on points carrying dual
perturbations it returns duals. Fields built from expressions are differentiable that way to any
nesting depth, so brackets of brackets stay exact. Fields defined through numeric maps (flows,
interpolated feedbacks) only accept floats and are differentiated by central differences.
"""
from abc import ABC, abstractmethod
from typing import Callable, List, Mapping, Optional, Sequence

import torch

from expressions import ExprVec, Number
from expressions import dual
from models import ControlSystem
from utils.errors import DimensionMismatch

DEFAULT_FD_STEP = 1e-5


def to_tensor(values: Sequence[Number]) -> torch.Tensor:
    return torch.tensor([dual.real(v) for v in values], dtype=torch.float64)


class VectorField(ABC):
    def __init__(self, dim: int, fd_step: float = DEFAULT_FD_STEP):
        if dim < 1:
            raise DimensionMismatch(f"Vector field dimension must be positive, got {dim}")
        self._dim = dim
        self._fd_step = fd_step

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def differentiable(self) -> bool:
        """True when ``values`` accepts dual points."""
        return False

    @abstractmethod
    def values(self, point: Sequence[Number]) -> List[Number]:
        raise NotImplementedError()

    def __call__(self, point: Sequence[float]) -> torch.Tensor:
        if len(point) != self._dim:
            raise DimensionMismatch(f"Point of length {len(point)} for a field on R^{self._dim}")
        return to_tensor(self.values([float(p) for p in point]))

    def jacobian(self, point: Sequence[float]) -> torch.Tensor:
        """:return: [dim; dim]"""
        if self.differentiable:
            rows = dual.jacobian(self.values, [float(p) for p in point])
            return torch.tensor([[dual.real(v) for v in row] for row in rows], dtype=torch.float64)
        return finite_difference_jacobian(self, point, self._fd_step)


def finite_difference_jacobian(
    field: Callable[[Sequence[float]], torch.Tensor], point: Sequence[float], step: float = DEFAULT_FD_STEP
) -> torch.Tensor:
    base = torch.as_tensor(point, dtype=torch.float64)
    columns = []
    for j in range(base.shape[0]):
        shift = torch.zeros_like(base)
        shift[j] = step
        columns.append((field((base + shift).tolist()) - field((base - shift).tolist())) / (2 * step))
    return torch.stack(columns, dim=1)


class ExprField(VectorField):
    """f_u(x) = f(x, u) for fixed values of the remaining symbols."""

    def __init__(self, vector: ExprVec, state_names: Sequence[str], fixed: Optional[Mapping[str, float]] = None):
        super().__init__(len(state_names))
        if vector.dim != len(state_names):
            raise DimensionMismatch(f"Field with {vector.dim} components over {len(state_names)} states")
        self._vector = vector
        self._state_names = tuple(state_names)
        self._fixed = dict(fixed or {})

    @property
    def differentiable(self) -> bool:
        return True

    def values(self, point: Sequence[Number]) -> List[Number]:
        env = dict(self._fixed)
        env.update(zip(self._state_names, point))
        return self._vector.evaluate(env)

    def __repr__(self) -> str:
        return f"ExprField({self._vector})"


def drift_field(system: ControlSystem, u: Sequence[float]) -> ExprField:
    return ExprField(system.f, system.states, dict(zip(system.controls, [float(v) for v in u])))


class ControlColumnField(VectorField):
    """x ↦ ∂f/∂u_j (x, ū)"""

    def __init__(self, system: ControlSystem, u: Sequence[float], column: int):
        super().__init__(system.n)
        self._system = system
        self._u = [float(v) for v in u]
        self._column = column

    @property
    def differentiable(self) -> bool:
        return True

    def values(self, point: Sequence[Number]) -> List[Number]:
        env = self._system.symbols.point(list(point), self._u)
        rows = self._system.f.jacobian_rows(self._system.controls, env)
        return [row[self._column] for row in rows]


class ConstantField(VectorField):
    def __init__(self, vector: Sequence[float]):
        super().__init__(len(vector))
        self._vector = [float(v) for v in vector]

    @property
    def differentiable(self) -> bool:
        return True

    def values(self, point: Sequence[Number]) -> List[Number]:
        return list(self._vector)

    def __repr__(self) -> str:
        return f"ConstantField({self._vector})"


class CallableField(VectorField):
    """Field given by a numeric map ``R^d -> R^d`` on floats."""

    def __init__(
        self, function: Callable[[Sequence[float]], Sequence[float]], dim: int, fd_step: float = DEFAULT_FD_STEP
    ):
        super().__init__(dim, fd_step)
        self._function = function

    def values(self, point: Sequence[Number]) -> List[Number]:
        return [float(v) for v in self._function([dual.real(p) for p in point])]


class LinearCombinationField(VectorField):
    def __init__(self, fields: Sequence[VectorField], coefficients: Sequence[float]):
        if len(fields) == 0 or len(fields) != len(coefficients):
            raise DimensionMismatch(f"{len(fields)} fields with {len(coefficients)} coefficients")
        if len({f.dim for f in fields}) != 1:
            raise DimensionMismatch("Combined fields must share one dimension")
        super().__init__(fields[0].dim)
        self._fields = list(fields)
        self._coefficients = [float(c) for c in coefficients]

    @property
    def differentiable(self) -> bool:
        return all(f.differentiable for f in self._fields)

    def values(self, point: Sequence[Number]) -> List[Number]:
        result: List[Number] = [0.0] * self.dim
        for field, coefficient in zip(self._fields, self._coefficients):
            result = [r + coefficient * v for r, v in zip(result, field.values(point))]
        return result


class BracketField(VectorField):
    """[X, Y] = DY·X - DX·Y"""

    def __init__(self, first: VectorField, second: VectorField, fd_step: float = DEFAULT_FD_STEP):
        if first.dim != second.dim:
            raise DimensionMismatch(f"Bracket of fields on R^{first.dim} and R^{second.dim}")
        super().__init__(first.dim, fd_step)
        self._first = first
        self._second = second

    @property
    def differentiable(self) -> bool:
        return self._first.differentiable and self._second.differentiable

    def values(self, point: Sequence[Number]) -> List[Number]:
        if not self.differentiable:
            return lie_bracket(self._first, self._second, [dual.real(p) for p in point], self._fd_step).tolist()
        x_values, y_values = self._first.values(point), self._second.values(point)
        dx, dy = dual.jacobian(self._first.values, point), dual.jacobian(self._second.values, point)
        return [
            sum((dy[i][j] * x_values[j] - dx[i][j] * y_values[j] for j in range(self.dim)), 0.0)
            for i in range(self.dim)
        ]


def lie_bracket(
    first: VectorField, second: VectorField, point: Sequence[float], fd_step: float = DEFAULT_FD_STEP
) -> torch.Tensor:
    """(DY·X - DX·Y)(p), Jacobians by forward-mode AD when both fields allow it.
    :return: [dim]
    """
    if first.dim != second.dim or len(point) != first.dim:
        raise DimensionMismatch(f"Bracket of fields on R^{first.dim} and R^{second.dim} at a point of R^{len(point)}")
    if first.differentiable and second.differentiable:
        return BracketField(first, second)(point)
    dx = finite_difference_jacobian(first, point, fd_step)
    dy = finite_difference_jacobian(second, point, fd_step)
    return dy @ first(point) - dx @ second(point)
