import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, ClassVar, Dict, FrozenSet, Mapping, Tuple

from expressions import dual
from expressions.dual import Number, real
from utils.errors import DomainError, UnknownSymbol

# printing precedence, higher binds tighter
ADDITIVE = 1
MULTIPLICATIVE = 2
UNARY = 3
POWER = 4
ATOM = 5


class Expr(ABC):
    precedence: ClassVar[int] = ATOM

    @abstractmethod
    def evaluate(self, env: Mapping[str, Number]) -> Number:
        ...

    @abstractmethod
    def children(self) -> Tuple["Expr", ...]:
        ...

    @abstractmethod
    def to_text(self) -> str:
        ...

    def symbols(self) -> FrozenSet[str]:
        result: FrozenSet[str] = frozenset()
        for child in self.children():
            result = result | child.symbols()
        return result

    def depth(self) -> int:
        return 1 + max((child.depth() for child in self.children()), default=0)

    def __str__(self) -> str:
        return self.to_text()


def _wrap(child: Expr, required: int) -> str:
    text = child.to_text()
    return f"({text})" if child.precedence < required else text


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or self.value < 0:
            raise ValueError(f"Constants must be finite and non-negative, got {self.value}")

    def evaluate(self, env: Mapping[str, Number]) -> Number:
        return self.value

    def children(self) -> Tuple[Expr, ...]:
        return ()

    def to_text(self) -> str:
        return repr(float(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def evaluate(self, env: Mapping[str, Number]) -> Number:
        if self.name not in env:
            raise UnknownSymbol(self.name)
        return env[self.name]

    def children(self) -> Tuple[Expr, ...]:
        return ()

    def symbols(self) -> FrozenSet[str]:
        return frozenset([self.name])

    def to_text(self) -> str:
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr
    precedence: ClassVar[int] = UNARY

    def evaluate(self, env: Mapping[str, Number]) -> Number:
        return -self.operand.evaluate(env)

    def children(self) -> Tuple[Expr, ...]:
        return (self.operand,)

    def to_text(self) -> str:
        return f"-{_wrap(self.operand, UNARY)}"


@dataclass(frozen=True)
class BinaryOp(Expr):
    left: Expr
    right: Expr
    symbol: ClassVar[str] = "?"

    @abstractmethod
    def apply(self, left: Number, right: Number) -> Number:
        ...

    def evaluate(self, env: Mapping[str, Number]) -> Number:
        return self.apply(self.left.evaluate(env), self.right.evaluate(env))

    def children(self) -> Tuple[Expr, ...]:
        return self.left, self.right

    def to_text(self) -> str:
        # operators are left associative: an equal-precedence right operand needs parentheses
        return f"{_wrap(self.left, self.precedence)}{self.symbol}{_wrap(self.right, self.precedence + 1)}"


@dataclass(frozen=True)
class Add(BinaryOp):
    precedence: ClassVar[int] = ADDITIVE
    symbol: ClassVar[str] = " + "

    def apply(self, left: Number, right: Number) -> Number:
        return left + right


@dataclass(frozen=True)
class Sub(BinaryOp):
    precedence: ClassVar[int] = ADDITIVE
    symbol: ClassVar[str] = " - "

    def apply(self, left: Number, right: Number) -> Number:
        return left - right


@dataclass(frozen=True)
class Mul(BinaryOp):
    precedence: ClassVar[int] = MULTIPLICATIVE
    symbol: ClassVar[str] = "*"

    def apply(self, left: Number, right: Number) -> Number:
        return left * right


@dataclass(frozen=True)
class Div(BinaryOp):
    precedence: ClassVar[int] = MULTIPLICATIVE
    symbol: ClassVar[str] = "/"

    def apply(self, left: Number, right: Number) -> Number:
        if real(right) == 0.0:
            raise DomainError("Division by zero", self.to_text())
        return left / right


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int
    precedence: ClassVar[int] = POWER

    def evaluate(self, env: Mapping[str, Number]) -> Number:
        base = self.base.evaluate(env)
        if real(base) == 0.0 and self.exponent < 0:
            raise DomainError("Negative power of zero", self.to_text())
        try:
            return base ** self.exponent
        except OverflowError:
            raise DomainError("Overflow", self.to_text())

    def children(self) -> Tuple[Expr, ...]:
        return (self.base,)

    def to_text(self) -> str:
        return f"{_wrap(self.base, ATOM)}^{self.exponent}"


@dataclass(frozen=True)
class Call(Expr):
    argument: Expr
    name: ClassVar[str] = "?"

    @abstractmethod
    def apply(self, value: Number) -> Number:
        ...

    def evaluate(self, env: Mapping[str, Number]) -> Number:
        return self.apply(self.argument.evaluate(env))

    def children(self) -> Tuple[Expr, ...]:
        return (self.argument,)

    def to_text(self) -> str:
        return f"{self.name}({self.argument.to_text()})"


@dataclass(frozen=True)
class Sin(Call):
    name: ClassVar[str] = "sin"

    def apply(self, value: Number) -> Number:
        return dual.sin(value)


@dataclass(frozen=True)
class Cos(Call):
    name: ClassVar[str] = "cos"

    def apply(self, value: Number) -> Number:
        return dual.cos(value)


@dataclass(frozen=True)
class Exp(Call):
    name: ClassVar[str] = "exp"

    def apply(self, value: Number) -> Number:
        try:
            return dual.exp(value)
        except OverflowError:
            raise DomainError("Overflow", self.to_text())


@dataclass(frozen=True)
class Tanh(Call):
    name: ClassVar[str] = "tanh"

    def apply(self, value: Number) -> Number:
        return dual.tanh(value)


@dataclass(frozen=True)
class Sqrt(Call):
    name: ClassVar[str] = "sqrt"

    def apply(self, value: Number) -> Number:
        argument = real(value)
        if argument < 0.0:
            raise DomainError("Square root of a negative number", self.to_text())
        if argument == 0.0 and isinstance(value, dual.Dual):
            raise DomainError("Square root is not differentiable at zero", self.to_text())
        return dual.sqrt(value)


FUNCTIONS: Dict[str, Callable[[Expr], Expr]] = {"sin": Sin, "cos": Cos, "exp": Exp, "tanh": Tanh, "sqrt": Sqrt}


def evaluate(expr: Expr, point: Mapping[str, Number]) -> Number:
    value = expr.evaluate(point)
    if not math.isfinite(real(value)):
        raise DomainError("Non-finite value", expr.to_text())
    return value
