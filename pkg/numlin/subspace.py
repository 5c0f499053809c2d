import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import torch

from utils.errors import DimensionMismatch

DEFAULT_TOL = 1e-9

MatrixLike = Union[torch.Tensor, Sequence[Sequence[float]]]


def as_matrix(matrix: MatrixLike) -> torch.Tensor:
    result = torch.as_tensor(matrix, dtype=torch.float64)
    if result.dim() == 1:
        result = result.unsqueeze(1)
    return result


def singular_values(matrix: MatrixLike) -> torch.Tensor:
    m = as_matrix(matrix)
    if m.numel() == 0:
        return m.new_zeros((0,))
    return torch.linalg.svdvals(m)


def numerical_rank(matrix: MatrixLike, rel_tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``rel_tol`` times the largest one."""
    if rel_tol <= 0:
        raise ValueError(f"Relative tolerance must be positive, got {rel_tol}")
    values = singular_values(matrix)
    if values.numel() == 0 or values[0] == 0:
        return 0
    return int((values > rel_tol * values[0]).sum().item())


def is_rank_robust(matrix: MatrixLike, rel_tol: float = DEFAULT_TOL, hysteresis: float = 10.0) -> bool:
    """True when the rank does not change across [rel_tol / hysteresis, rel_tol * hysteresis]."""
    return numerical_rank(matrix, rel_tol / hysteresis) == numerical_rank(matrix, rel_tol * hysteresis)


@dataclass(frozen=True)
class Subspace:
    basis: torch.Tensor  # [ambient dim; k], orthonormal columns
    tol: float

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project(self, vector: MatrixLike) -> torch.Tensor:
        v = torch.as_tensor(vector, dtype=torch.float64)
        return self.basis @ (self.basis.T @ v)

    def residual(self, vector: MatrixLike) -> float:
        """Norm of the component of ``vector`` orthogonal to the subspace."""
        v = torch.as_tensor(vector, dtype=torch.float64)
        if v.shape[0] != self.ambient_dim:
            raise DimensionMismatch(f"Vector of length {v.shape[0]} in a subspace of R^{self.ambient_dim}")
        return torch.linalg.norm(v - self.project(v)).item()

    def contains(self, vector: MatrixLike, rel_tol: float = DEFAULT_TOL) -> bool:
        v = torch.as_tensor(vector, dtype=torch.float64)
        return self.residual(v) <= rel_tol * max(torch.linalg.norm(v).item(), 1e-300)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "ambient_dim": self.ambient_dim, "basis": self.basis.T.tolist(), "tol": self.tol}


def span(
    vectors: Sequence[Sequence[float]], rel_tol: float = DEFAULT_TOL, ambient_dim: Optional[int] = None
) -> Subspace:
    """Orthonormal basis of the numerical column span of ``vectors``.
    :param vectors: list of d-vectors
    :param ambient_dim: needed only when ``vectors`` is empty
    """
    if len(vectors) == 0:
        if ambient_dim is None:
            raise DimensionMismatch("Ambient dimension of an empty span is unknown")
        return Subspace(torch.zeros((ambient_dim, 0), dtype=torch.float64), rel_tol)
    # [d; number of vectors]
    matrix = torch.stack([torch.as_tensor(v, dtype=torch.float64).reshape(-1) for v in vectors], dim=1)
    if ambient_dim is not None and matrix.shape[0] != ambient_dim:
        raise DimensionMismatch(f"Vectors of length {matrix.shape[0]} in R^{ambient_dim}")
    rank = numerical_rank(matrix, rel_tol)
    u, _, _ = torch.linalg.svd(matrix, full_matrices=False)
    return Subspace(u[:, :rank].contiguous(), rel_tol)


def column_span(matrix: MatrixLike, rel_tol: float = DEFAULT_TOL) -> Subspace:
    m = as_matrix(matrix)
    return span([m[:, j] for j in range(m.shape[1])], rel_tol, ambient_dim=m.shape[0])


def subspace_distance(first: Subspace, second: Subspace) -> float:
    """Largest principal angle between two subspaces, pi/2 when their dimensions differ."""
    if first.ambient_dim != second.ambient_dim:
        raise DimensionMismatch(f"Subspaces of R^{first.ambient_dim} and R^{second.ambient_dim}")
    if first.dim != second.dim:
        return math.pi / 2
    if first.dim == 0:
        return 0.0
    smallest_cosine = torch.linalg.svdvals(first.basis.T @ second.basis).min().clamp(0.0, 1.0).item()
    if smallest_cosine < math.sqrt(0.5):
        return math.acos(smallest_cosine)
    # small angles: arcsin of the sines is accurate where arccos of the cosines is not
    sines = torch.linalg.svdvals(second.basis - first.basis @ (first.basis.T @ second.basis))
    return math.asin(min(sines.max().item(), 1.0))
