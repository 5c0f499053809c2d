from geometry.classification import REGULAR, STRONGLY_SINGULAR, WEAKLY_SINGULAR, PointClass, classify_point
from geometry.flag import FibrationCheck, FlagLevel, FlagReport, build_flag
from geometry.limit_directions import estimate_D, jacobian_range
from geometry.parameters import VerdictParameters
from geometry.vector_fields import (
    BracketField,
    CallableField,
    ConstantField,
    ControlColumnField,
    ExprField,
    LinearCombinationField,
    VectorField,
    drift_field,
    lie_bracket,
)
from geometry.verdict import (
    INCONCLUSIVE,
    NOT_LINEARIZABLE,
    QUASI_SMOOTH_CANDIDATE,
    SMOOTH_LINEARIZABLE,
    fibration_surrogate,
    linearizability_verdict,
)

__all__ = [
    "BracketField",
    "CallableField",
    "ConstantField",
    "ControlColumnField",
    "ExprField",
    "FibrationCheck",
    "FlagLevel",
    "FlagReport",
    "INCONCLUSIVE",
    "LinearCombinationField",
    "NOT_LINEARIZABLE",
    "PointClass",
    "QUASI_SMOOTH_CANDIDATE",
    "REGULAR",
    "SMOOTH_LINEARIZABLE",
    "STRONGLY_SINGULAR",
    "VectorField",
    "VerdictParameters",
    "WEAKLY_SINGULAR",
    "build_flag",
    "classify_point",
    "drift_field",
    "estimate_D",
    "fibration_surrogate",
    "jacobian_range",
    "lie_bracket",
    "linearizability_verdict",
]
