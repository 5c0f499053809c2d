import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import torch

from data_module.grids import box_grid, capped_count
from dynamics.feedback import Feedback
from dynamics.integrator import TimeControl, control_function, solve
from expressions import Add, Const, ExprVec, Number, Sub, SymbolTable
from models import ControlSystem, LinearPair
from utils.errors import BoxExit, DimensionMismatch, InputError, NotTriangular

logger = logging.getLogger(__name__)

RESIDUAL_SAMPLES = 101 * 101


@dataclass(frozen=True, eq=False)
class Conjugation:
    """Static feedback transformation (x, u) ↦ (χ_I(x), χ_II(x, u)) of a system.

    ``inverse_i`` optionally gives χ_I⁻¹ as expressions in ``target_states``.
    """

    system: ControlSystem
    chi_i: ExprVec
    chi_ii: ExprVec
    inverse_i: Optional[ExprVec] = None
    target_states: Tuple[str, ...] = ()
    allow_non_triangular: bool = False

    def __post_init__(self):
        if self.chi_i.dim != self.system.n:
            raise DimensionMismatch(f"chi_I has {self.chi_i.dim} components for n = {self.system.n}")
        if self.chi_ii.dim != self.system.m:
            raise DimensionMismatch(f"chi_II has {self.chi_ii.dim} components for m = {self.system.m}")
        if self.chi_i.depends_on(self.system.controls) and not self.allow_non_triangular:
            raise NotTriangular(f"chi_I = ({self.chi_i}) depends on the controls")
        if self.inverse_i is not None and self.inverse_i.dim != self.system.n:
            raise DimensionMismatch(f"Inverse of chi_I has {self.inverse_i.dim} components for n = {self.system.n}")

    @staticmethod
    def from_strings(
        system: ControlSystem,
        chi_i: Sequence[str],
        chi_ii: Sequence[str],
        inverse_i: Optional[Sequence[str]] = None,
        target_prefix: str = "z",
        allow_non_triangular: bool = False,
    ) -> "Conjugation":
        target_states = tuple(f"{target_prefix}{i + 1}" for i in range(system.n))
        inverse = None if inverse_i is None else ExprVec.parse(inverse_i, SymbolTable(target_states))
        return Conjugation(
            system,
            ExprVec.parse(chi_i, system.symbols),
            ExprVec.parse(chi_ii, system.symbols),
            inverse,
            target_states,
            allow_non_triangular,
        )

    @property
    def triangular(self) -> bool:
        return not self.chi_i.depends_on(self.system.controls)

    def _point(self, x: Sequence[Number], u: Optional[Sequence[Number]]) -> Dict[str, Number]:
        return self.system.symbols.point(list(x), list(u) if u is not None else [0.0] * self.system.m)

    def map_state(self, x: Sequence[Number], u: Optional[Sequence[Number]] = None) -> List[Number]:
        return self.chi_i.evaluate(self._point(x, u))

    def map_control(self, x: Sequence[Number], u: Sequence[Number]) -> List[Number]:
        return self.chi_ii.evaluate(self._point(x, u))

    def inverse_state(self, z: Sequence[Number]) -> List[Number]:
        if self.inverse_i is None:
            raise InputError("The conjugation carries no inverse of chi_I")
        return self.inverse_i.evaluate(dict(zip(self.target_states, z)))

    def state_jacobian(self, x: Sequence[float], u: Optional[Sequence[float]] = None) -> torch.Tensor:
        """∂χ_I/∂x
        :return: [n; n]
        """
        return self.chi_i.jacobian(self.system.states, self._point([float(v) for v in x], u))

    def with_perturbed_control(self, offset: float) -> "Conjugation":
        """Same conjugation with ``offset`` added to every component of χ_II."""
        components = tuple(
            Add(c, Const(offset)) if offset >= 0 else Sub(c, Const(-offset)) for c in self.chi_ii.components
        )
        return Conjugation(
            self.system,
            self.chi_i,
            ExprVec(components, self.chi_ii.symbols),
            self.inverse_i,
            self.target_states,
            self.allow_non_triangular,
        )


class TransportedFeedback(Feedback):
    """χ□α(z) = χ_II(χ_I⁻¹(z), α(χ_I⁻¹(z)))"""

    def __init__(self, conjugation: Conjugation, alpha: Feedback):
        if conjugation.inverse_i is None:
            raise InputError("Transporting a feedback needs the inverse of chi_I")
        if alpha.n != conjugation.system.n or alpha.m != conjugation.system.m:
            raise DimensionMismatch(f"Feedback R^{alpha.n} -> R^{alpha.m} does not fit the conjugated system")
        super().__init__(conjugation.system.n, conjugation.system.m)
        self._conjugation = conjugation
        self._alpha = alpha

    @property
    def differentiable(self) -> bool:
        return self._alpha.differentiable

    def values(self, z: Sequence[Number]) -> List[Number]:
        x = self._conjugation.inverse_state(z)
        return self._conjugation.map_control(x, self._alpha.values(x))


def transport_feedback(conjugation: Conjugation, alpha: Feedback) -> Feedback:
    return TransportedFeedback(conjugation, alpha)


def _check_target(system: ControlSystem, target: LinearPair):
    if (target.n, target.m) != (system.n, system.m):
        raise DimensionMismatch(f"Target pair of size {(target.n, target.m)} for a system with {(system.n, system.m)}")


def conjugacy_residual(
    system: ControlSystem,
    conjugation: Conjugation,
    target: LinearPair,
    sample_grid: Optional[Sequence[Sequence[float]]] = None,
    grid: int = 101,
    max_samples: Optional[int] = RESIDUAL_SAMPLES,
) -> float:
    """max over samples (x, u) of ‖∂χ_I/∂x (x) f(x, u) - A χ_I(x) - B χ_II(x, u)‖.

    :param sample_grid: points (x, u) of length n + m; defaults to ``grid`` nodes per axis over the box
    :param max_samples: bound on the size of the default grid, ``grid`` is reduced per axis to respect it
    """
    _check_target(system, target)
    if sample_grid is None:
        names = list(system.states) + list(system.controls)
        count = capped_count(grid, len(names), max_samples)
        if count < grid:
            logger.debug(f"Residual grid reduced from {grid} to {count} nodes per axis over {len(names)} axes")
        sample_grid = box_grid(system, names, count)
    worst = 0.0
    for point in sample_grid:
        x, u = list(point[: system.n]), list(point[system.n :])
        lhs = conjugation.state_jacobian(x, u) @ system.evaluate_tensor(x, u)
        z = torch.tensor(conjugation.map_state(x, u), dtype=torch.float64)
        v = torch.tensor(conjugation.map_control(x, u), dtype=torch.float64)
        worst = max(worst, torch.linalg.norm(lhs - target.A @ z - target.B @ v).item())
    return worst


@dataclass
class ConjugacyCheck:
    max_deviation: float
    triangularity_defect: float
    deviations: List[float] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "max_deviation": self.max_deviation,
            "triangularity_defect": self.triangularity_defect,
            "deviations": self.deviations,
        }


def default_test_controls(m: int) -> List[TimeControl]:
    """Constant, ramp and sinusoid."""
    return [lambda t: [1.0] * m, lambda t: [t] * m, lambda t: [math.sin(t)] * m]


def triangularity_defect(conjugation: Conjugation, grid: int = 3) -> float:
    """Largest change of χ_I at fixed x when only u varies, over a grid on the box."""
    system = conjugation.system
    controls = box_grid(system, system.controls, grid)
    worst = 0.0
    for x in box_grid(system, system.states, grid):
        reference = torch.tensor(conjugation.map_state(x, controls[0]), dtype=torch.float64)
        for u in controls[1:]:
            moved = torch.tensor(conjugation.map_state(x, u), dtype=torch.float64)
            worst = max(worst, torch.linalg.norm(moved - reference).item())
    return worst


def verify_conjugacy_dynamic(
    system: ControlSystem,
    conjugation: Conjugation,
    target: LinearPair,
    x0: Sequence[float],
    controls: Optional[Sequence[TimeControl]] = None,
    t_span: Tuple[float, float] = (0.0, 1.0),
    dt: float = 1e-3,
) -> ConjugacyCheck:
    """Drive the system and the linear target side by side.

    For every control u(t), x follows ẋ = f(x, u) and z follows ż = Az + Bχ_II(x, u) from
    z(0) = χ_I(x(0)); the deviation is the largest ‖χ_I(x(t)) - z(t)‖ on the time grid.
    """
    _check_target(system, target)
    if controls is None:
        controls = default_test_controls(system.m)
    n = system.n
    deviations = []
    for control in controls:
        control_at = control_function(system, control)

        def rhs(t: float, joint: torch.Tensor, control_at: Callable = control_at) -> torch.Tensor:
            x, z = joint[:n].tolist(), joint[n:]
            u = control_at(t, joint[:n])
            v = torch.tensor(conjugation.map_control(x, u), dtype=torch.float64)
            return torch.cat([system.evaluate_tensor(x, u), target.A @ z + target.B @ v])

        u0 = control_at(t_span[0], torch.as_tensor(x0, dtype=torch.float64))
        joint0 = list(x0) + [float(v) for v in conjugation.map_state(x0, u0)]
        times, states, exited = solve(
            rhs, joint0, t_span[0], t_span[1] - t_span[0], dt, lambda joint: system.state_in_box(joint[:n])
        )
        if exited:
            raise BoxExit(f"Verification of {system.name} left the domain box after t={times[-1].item():.6g}")
        deviation = 0.0
        for t, joint in zip(times.tolist(), states):
            u = control_at(t, joint[:n])
            mapped = torch.tensor(conjugation.map_state(joint[:n].tolist(), u), dtype=torch.float64)
            deviation = max(deviation, torch.linalg.norm(mapped - joint[n:]).item())
        deviations.append(deviation)
    return ConjugacyCheck(max(deviations, default=0.0), triangularity_defect(conjugation), deviations)
