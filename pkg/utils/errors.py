from typing import Any, Optional


class LinearizabilityError(Exception):
    pass


# ========== Input errors (exit code 2) ==========


class InputError(LinearizabilityError, ValueError):
    pass


class ExprSyntaxError(InputError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownSymbol(InputError):
    def __init__(self, symbol: str):
        super().__init__(f"Unknown symbol: {symbol}")
        self.symbol = symbol


class DimensionMismatch(InputError):
    pass


class SystemFileError(InputError):
    pass


class NotTriangular(InputError):
    pass


# ========== Numerical failures (exit code 3) ==========


class NumericalFailure(LinearizabilityError, RuntimeError):
    pass


class DomainError(NumericalFailure):
    def __init__(self, message: str, node: str):
        super().__init__(f"{message} in {node}")
        self.node = node


class BoxExit(NumericalFailure):
    def __init__(self, message: str, trajectory: Optional[Any] = None):
        super().__init__(message)
        self.trajectory = trajectory


class NotControllable(NumericalFailure):
    pass


class CannotAchieve(NumericalFailure):
    pass


# ========== Recorded sampling caveats ==========


class DegenerateMap(UserWarning):
    pass


class NonConstantD(UserWarning):
    pass
