from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import torch

from expressions import Add, Const, Expr, ExprVec, Mul, Neg, Sub, SymbolTable, Var
from utils.errors import DimensionMismatch, InputError


@dataclass(frozen=True, eq=False)
class LinearPair:
    """ẋ = Ax + Bu"""

    A: torch.Tensor  # [n; n]
    B: torch.Tensor  # [n; m]

    def __post_init__(self):
        object.__setattr__(self, "A", torch.as_tensor(self.A, dtype=torch.float64))
        object.__setattr__(self, "B", torch.as_tensor(self.B, dtype=torch.float64))
        if self.A.dim() != 2 or self.A.shape[0] != self.A.shape[1]:
            raise DimensionMismatch(f"A must be square, got shape {tuple(self.A.shape)}")
        if self.B.dim() != 2 or self.B.shape[0] != self.A.shape[0]:
            raise DimensionMismatch(f"B must have {self.A.shape[0]} rows, got shape {tuple(self.B.shape)}")
        if not (torch.isfinite(self.A).all() and torch.isfinite(self.B).all()):
            raise InputError("Matrices of a linear pair must be finite")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    def transformed(self, P: torch.Tensor, K: torch.Tensor, Q: torch.Tensor) -> "LinearPair":
        """(P(A - BK)P⁻¹, PBQ⁻¹): the pair reached by z = Px, v = Q(u + Kx)."""
        P_inv = torch.linalg.inv(P)
        return LinearPair(P @ (self.A - self.B @ K) @ P_inv, P @ self.B @ torch.linalg.inv(Q))

    def to_control_system(self, state_prefix: str = "z", control_prefix: str = "v", name: str = "linear"):
        from models.control_system import ControlSystem

        states = [f"{state_prefix}{i + 1}" for i in range(self.n)]
        controls = [f"{control_prefix}{i + 1}" for i in range(self.m)]
        symbols = SymbolTable(states, controls)
        rows = torch.cat([self.A, self.B], dim=1)
        components = tuple(linear_combination(rows[i].tolist(), symbols.names) for i in range(self.n))
        return ControlSystem(name, symbols, ExprVec(components, symbols.names))

    def to_dict(self) -> Dict:
        return {"A": self.A.tolist(), "B": self.B.tolist()}


def linear_combination(coefficients: Sequence[float], names: Sequence[str]) -> Expr:
    """Expression for Σ c_i·names_i, skipping zero coefficients."""
    result: Optional[Expr] = None
    for coefficient, name in zip(coefficients, names):
        if coefficient == 0:
            continue
        term: Expr = Var(name) if abs(coefficient) == 1 else Mul(Const(abs(coefficient)), Var(name))
        if result is None:
            result = term if coefficient > 0 else Neg(term)
        else:
            result = Add(result, term) if coefficient > 0 else Sub(result, term)
    return Const(0.0) if result is None else result


@dataclass
class KroneckerData:
    r: List[int]  # r_j = rank(B, AB, ..., A^{j-1}B), j = 0 .. n
    s: List[int]  # s_0 = m, s_j = r_j - r_{j-1}
    sigma: List[int]  # sigma_i = sum_{j >= i} s_j, i = 0 .. rho
    rho: int  # smallest j with s_j = 0
    kappa: List[int]  # descending, zero padded to m
    controllable: bool

    def to_dict(self) -> Dict:
        return {
            "r": self.r,
            "s": self.s,
            "sigma": self.sigma,
            "rho": self.rho,
            "kappa": self.kappa,
            "controllable": self.controllable,
        }


@dataclass
class BrunovskyResult:
    P: torch.Tensor  # [n; n]
    K: torch.Tensor  # [m; n]
    Q: torch.Tensor  # [m; m]
    Ac: torch.Tensor  # [n; n]
    Bc: torch.Tensor  # [n; m]
    kappa: List[int] = field(default_factory=list)
    form: str = "block"

    def residual(self, pair: LinearPair) -> Tuple[float, float]:
        """Relative residuals of Ac = P(A - BK)P⁻¹ and Bc = PBQ⁻¹."""
        reached = pair.transformed(self.P, self.K, self.Q)
        a_scale = max(1.0, torch.linalg.norm(self.Ac).item())
        b_scale = max(1.0, torch.linalg.norm(self.Bc).item())
        return (
            torch.linalg.norm(reached.A - self.Ac).item() / a_scale,
            torch.linalg.norm(reached.B - self.Bc).item() / b_scale,
        )

    def to_dict(self) -> Dict:
        return {
            "form": self.form,
            "kappa": self.kappa,
            "P": self.P.tolist(),
            "K": self.K.tolist(),
            "Q": self.Q.tolist(),
            "Ac": self.Ac.tolist(),
            "Bc": self.Bc.tolist(),
        }
