import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import torch

from expressions import ExprVec, Number, SymbolTable
from models.linear_pair import LinearPair
from utils.errors import DimensionMismatch, InputError

Interval = Tuple[float, float]


@dataclass(frozen=True, eq=False)
class ControlSystem:
    """ẋ = f(x, u) on a domain box of states and controls."""

    name: str
    symbols: SymbolTable
    f: ExprVec
    box: Dict[str, Interval] = field(default_factory=dict)

    def __post_init__(self):
        if self.f.dim != len(self.symbols.states):
            raise DimensionMismatch(f"System {self.name} has {len(self.symbols.states)} states but f has {self.f.dim}")
        for name in self.symbols:
            lo, hi = self.box.setdefault(name, (-math.inf, math.inf))
            if not lo < hi:
                raise InputError(f"Empty box interval for {name}: [{lo}, {hi}]")

    @staticmethod
    def from_strings(
        name: str,
        states: Sequence[str],
        controls: Sequence[str],
        f: Sequence[str],
        box: Optional[Mapping[str, Interval]] = None,
    ) -> "ControlSystem":
        symbols = SymbolTable(states, controls)
        return ControlSystem(name, symbols, ExprVec.parse(f, symbols), dict(box or {}))

    @property
    def n(self) -> int:
        return len(self.symbols.states)

    @property
    def m(self) -> int:
        return len(self.symbols.controls)

    @property
    def states(self) -> Tuple[str, ...]:
        return self.symbols.states

    @property
    def controls(self) -> Tuple[str, ...]:
        return self.symbols.controls

    # ========== Evaluation ==========

    def evaluate(self, x: Sequence[Number], u: Sequence[Number]) -> List[Number]:
        return self.f.evaluate(self.symbols.point(x, u))

    def evaluate_tensor(self, x: Sequence[float], u: Sequence[float]) -> torch.Tensor:
        return torch.tensor(self.evaluate([float(v) for v in x], [float(v) for v in u]), dtype=torch.float64)

    def state_jacobian(self, x: Sequence[float], u: Sequence[float]) -> torch.Tensor:
        """:return: [n; n]"""
        return self.f.jacobian(self.states, self.symbols.point([float(v) for v in x], [float(v) for v in u]))

    def control_jacobian(self, x: Sequence[float], u: Sequence[float]) -> torch.Tensor:
        """:return: [n; m]"""
        return self.f.jacobian(self.controls, self.symbols.point([float(v) for v in x], [float(v) for v in u]))

    def linear_approximation(self, x: Sequence[float], u: Sequence[float]) -> LinearPair:
        return LinearPair(self.state_jacobian(x, u), self.control_jacobian(x, u))

    # ========== Domain box ==========

    def bounds(self, names: Sequence[str]) -> Tuple[torch.Tensor, torch.Tensor]:
        lower = torch.tensor([self.box[name][0] for name in names], dtype=torch.float64)
        upper = torch.tensor([self.box[name][1] for name in names], dtype=torch.float64)
        return lower, upper

    def scales(self, names: Sequence[str]) -> torch.Tensor:
        """Box widths used to express radii in box-normalized units; unbounded axes count as width 2."""
        widths = [self.box[name][1] - self.box[name][0] for name in names]
        return torch.tensor([w if math.isfinite(w) else 2.0 for w in widths], dtype=torch.float64)

    def contains(self, names: Sequence[str], values: Sequence[float], slack: float = 1e-12) -> bool:
        for name, value in zip(names, values):
            lo, hi = self.box[name]
            if not lo - slack <= value <= hi + slack:
                return False
        return True

    def state_in_box(self, x: Sequence[float]) -> bool:
        """Closed box test without slack, so every recorded trajectory sample lies in the box."""
        return self.contains(self.states, x, slack=0.0)

    def __repr__(self) -> str:
        return f"ControlSystem({self.name}: d/dt ({', '.join(self.states)}) = ({self.f}))"
