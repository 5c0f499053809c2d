from numlin.subspace import (
    DEFAULT_TOL,
    Subspace,
    as_matrix,
    column_span,
    is_rank_robust,
    numerical_rank,
    singular_values,
    span,
    subspace_distance,
)

__all__ = [
    "DEFAULT_TOL",
    "Subspace",
    "as_matrix",
    "column_span",
    "is_rank_robust",
    "numerical_rank",
    "singular_values",
    "span",
    "subspace_distance",
]
