from dataclasses import dataclass
from typing import Iterable, List, Mapping, Sequence, Tuple, Union

import torch

from expressions import dual
from expressions.dual import Number
from expressions.nodes import Expr, evaluate
from expressions.parser import parse_expr
from expressions.symbols import SymbolTable
from utils.errors import DimensionMismatch, UnknownSymbol


@dataclass(frozen=True)
class ExprVec:
    components: Tuple[Expr, ...]
    symbols: Tuple[str, ...]

    def __post_init__(self):
        if len(self.components) == 0:
            raise DimensionMismatch("Expression vector must have at least one component")
        for component in self.components:
            for name in component.symbols():
                if name not in self.symbols:
                    raise UnknownSymbol(name)

    @staticmethod
    def parse(texts: Sequence[str], symbols: Union[SymbolTable, Iterable[str]]) -> "ExprVec":
        table = symbols if isinstance(symbols, SymbolTable) else SymbolTable(list(symbols))
        return ExprVec(tuple(parse_expr(text, table) for text in texts), table.names)

    @property
    def dim(self) -> int:
        return len(self.components)

    def free_symbols(self) -> frozenset:
        result: frozenset = frozenset()
        for component in self.components:
            result = result | component.symbols()
        return result

    def depends_on(self, names: Iterable[str]) -> bool:
        return len(self.free_symbols() & set(names)) > 0

    def evaluate(self, point: Mapping[str, Number]) -> List[Number]:
        return [evaluate(component, point) for component in self.components]

    def jacobian_rows(self, wrt: Sequence[str], point: Mapping[str, Number]) -> List[List[Number]]:
        """Generic Jacobian; entries stay duals when ``point`` already carries perturbations."""
        for name in wrt:
            if name not in self.symbols:
                raise UnknownSymbol(name)
        base = [point[name] for name in wrt]

        def restricted(values: List[Number]) -> List[Number]:
            env = dict(point)
            env.update(zip(wrt, values))
            return self.evaluate(env)

        return dual.jacobian(restricted, base)

    def jacobian(self, wrt: Sequence[str], point: Mapping[str, float]) -> torch.Tensor:
        """Exact (to rounding) Jacobian at a float point.
        :return: [dim; len(wrt)]
        """
        rows = self.jacobian_rows(wrt, point)
        result = torch.zeros((self.dim, len(wrt)), dtype=torch.float64)
        for i, row in enumerate(rows):
            for j, entry in enumerate(row):
                result[i, j] = dual.real(entry)
        return result

    def __str__(self) -> str:
        return "; ".join(component.to_text() for component in self.components)
