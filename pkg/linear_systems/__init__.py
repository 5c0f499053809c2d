from linear_systems.canonical import brunovsky, chain_lengths, layer_permutation, layer_sizes, layered_canonical_form
from linear_systems.conjugacy import linearly_conjugate
from linear_systems.kronecker import controllability_matrix, kalman_controllable, kronecker_data

__all__ = [
    "brunovsky",
    "chain_lengths",
    "controllability_matrix",
    "kalman_controllable",
    "kronecker_data",
    "layer_permutation",
    "layer_sizes",
    "layered_canonical_form",
    "linearly_conjugate",
]
