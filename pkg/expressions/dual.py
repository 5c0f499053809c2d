"""Forward-mode dual numbers with perturbation tags.

Every call to :func:`jacobian` seeds its inputs with a fresh tag, so derivatives can be nested
(a bracket of brackets differentiates a function that itself differentiates) without mixing
the perturbations of different levels. A dual with a larger tag is always the outer layer.
"""
import math
from dataclasses import dataclass
from itertools import count
from typing import Callable, List, Sequence, Tuple, Union

_tag_counter = count(1)


@dataclass(frozen=True)
class Dual:
    primal: "Number"
    tangent: "Number"
    tag: int

    def __add__(self, other: "Number") -> "Number":
        tag = _top_tag(self, other)
        (ap, at), (bp, bt) = _split(self, tag), _split(other, tag)
        return Dual(ap + bp, at + bt, tag)

    def __radd__(self, other: "Number") -> "Number":
        return self.__add__(other)

    def __sub__(self, other: "Number") -> "Number":
        tag = _top_tag(self, other)
        (ap, at), (bp, bt) = _split(self, tag), _split(other, tag)
        return Dual(ap - bp, at - bt, tag)

    def __rsub__(self, other: "Number") -> "Number":
        tag = _top_tag(self, other)
        (ap, at), (bp, bt) = _split(other, tag), _split(self, tag)
        return Dual(ap - bp, at - bt, tag)

    def __mul__(self, other: "Number") -> "Number":
        tag = _top_tag(self, other)
        (ap, at), (bp, bt) = _split(self, tag), _split(other, tag)
        return Dual(ap * bp, at * bp + ap * bt, tag)

    def __rmul__(self, other: "Number") -> "Number":
        return self.__mul__(other)

    def __truediv__(self, other: "Number") -> "Number":
        return _divide(self, other)

    def __rtruediv__(self, other: "Number") -> "Number":
        return _divide(other, self)

    def __neg__(self) -> "Dual":
        return Dual(-self.primal, -self.tangent, self.tag)

    def __pow__(self, exponent: int) -> "Number":
        if exponent == 0:
            return 1.0
        if exponent == 1:
            return self
        return Dual(self.primal ** exponent, exponent * self.primal ** (exponent - 1) * self.tangent, self.tag)


Number = Union[float, Dual]


def new_tag() -> int:
    return next(_tag_counter)


def _top_tag(*values: Number) -> int:
    return max((v.tag for v in values if isinstance(v, Dual)), default=0)


def _split(value: Number, tag: int) -> Tuple[Number, Number]:
    if isinstance(value, Dual) and value.tag == tag:
        return value.primal, value.tangent
    return value, 0.0


def _divide(numerator: Number, denominator: Number) -> Number:
    tag = _top_tag(numerator, denominator)
    (ap, at), (bp, bt) = _split(numerator, tag), _split(denominator, tag)
    return Dual(ap / bp, (at * bp - ap * bt) / (bp * bp), tag)


def real(value: Number) -> float:
    while isinstance(value, Dual):
        value = value.primal
    return float(value)


def tangent_of(value: Number, tag: int) -> Number:
    return _split(value, tag)[1]


# ========== Elementary functions ==========


def sin(value: Number) -> Number:
    if isinstance(value, Dual):
        return Dual(sin(value.primal), value.tangent * cos(value.primal), value.tag)
    return math.sin(value)


def cos(value: Number) -> Number:
    if isinstance(value, Dual):
        return Dual(cos(value.primal), -(value.tangent * sin(value.primal)), value.tag)
    return math.cos(value)


def exp(value: Number) -> Number:
    if isinstance(value, Dual):
        primal = exp(value.primal)
        return Dual(primal, value.tangent * primal, value.tag)
    return math.exp(value)


def tanh(value: Number) -> Number:
    if isinstance(value, Dual):
        primal = tanh(value.primal)
        return Dual(primal, value.tangent * (1.0 - primal * primal), value.tag)
    return math.tanh(value)


def sqrt(value: Number) -> Number:
    if isinstance(value, Dual):
        primal = sqrt(value.primal)
        return Dual(primal, value.tangent / (2.0 * primal), value.tag)
    return math.sqrt(value)


# ========== Forward-mode derivatives ==========


def jacobian(
    function: Callable[[List[Number]], Sequence[Number]], point: Sequence[Number]
) -> List[List[Number]]:
    """Jacobian of ``function`` at ``point`` by one forward pass per input.
    :param function: maps a list of numbers (floats or duals) to a sequence of numbers
    :param point: [n inputs]
    :return: [n outputs][n inputs], entries are duals when ``point`` carries outer perturbations
    """
    columns: List[List[Number]] = []
    for j in range(len(point)):
        tag = new_tag()
        seeded = [Dual(value, 1.0, tag) if i == j else value for i, value in enumerate(point)]
        columns.append([tangent_of(output, tag) for output in function(seeded)])
    if not columns:
        return [[] for _ in function(list(point))]
    return [list(row) for row in zip(*columns)]


def directional_derivative(
    function: Callable[[List[Number]], Sequence[Number]], point: Sequence[Number], direction: Sequence[Number]
) -> List[Number]:
    tag = new_tag()
    seeded = [Dual(value, d, tag) for value, d in zip(point, direction)]
    return [tangent_of(output, tag) for output in function(seeded)]
