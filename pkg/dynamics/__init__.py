from dynamics.chattering import ChatteringResult, chattering
from dynamics.conjugation import (
    ConjugacyCheck,
    Conjugation,
    TransportedFeedback,
    conjugacy_residual,
    default_test_controls,
    transport_feedback,
    triangularity_defect,
    verify_conjugacy_dynamic,
)
from dynamics.feedback import (
    ClosedLoopField,
    ExprFeedback,
    Feedback,
    GridFeedback,
    SmoothedFeedback,
    closed_loop_field,
    constant_feedback,
    difference_field,
    smooth_feedback,
)
from dynamics.integrator import flow, integrate, solve
from dynamics.orbits import FlowComposition, difference_family, drift_family, flow_coords, orbit_dimension, pushforward

__all__ = [
    "ChatteringResult",
    "ClosedLoopField",
    "ConjugacyCheck",
    "Conjugation",
    "ExprFeedback",
    "Feedback",
    "FlowComposition",
    "GridFeedback",
    "SmoothedFeedback",
    "TransportedFeedback",
    "chattering",
    "closed_loop_field",
    "conjugacy_residual",
    "constant_feedback",
    "default_test_controls",
    "difference_family",
    "difference_field",
    "drift_family",
    "flow",
    "flow_coords",
    "integrate",
    "orbit_dimension",
    "pushforward",
    "smooth_feedback",
    "solve",
    "transport_feedback",
    "triangularity_defect",
    "verify_conjugacy_dynamic",
]
