import math

import pytest
import torch

from numlin import Subspace, column_span, is_rank_robust, numerical_rank, singular_values, span, subspace_distance
from utils.errors import DimensionMismatch


@pytest.mark.parametrize(
    "matrix, expected",
    [
        (torch.zeros((3, 3)), 0),
        (torch.eye(3), 3),
        (torch.diag(torch.tensor([1.0, 1e-14])), 1),
        (torch.zeros((0, 2)), 0),
        ([[1.0, 2.0], [2.0, 4.0]], 1),
    ],
)
def test_numerical_rank(matrix, expected):
    assert numerical_rank(matrix, 1e-9) == expected


def test_rank_is_scale_invariant(generator):
    matrix = torch.randn((4, 3), generator=generator, dtype=torch.float64)
    assert numerical_rank(matrix) == numerical_rank(1e-6 * matrix) == numerical_rank(1e6 * matrix) == 3


def random_orthogonal(generator, size: int) -> torch.Tensor:
    q, _ = torch.linalg.qr(torch.randn((size, size), generator=generator, dtype=torch.float64))
    return q


def test_rank_is_invariant_under_permutations_and_rotations(generator):
    for rank in range(4):
        matrix = torch.randn((5, rank), generator=generator, dtype=torch.float64) @ torch.randn(
            (rank, 4), generator=generator, dtype=torch.float64
        )
        rows, columns = torch.randperm(5, generator=generator), torch.randperm(4, generator=generator)
        assert numerical_rank(matrix) == rank
        assert numerical_rank(matrix[rows][:, columns]) == rank
        rotated = random_orthogonal(generator, 5) @ matrix @ random_orthogonal(generator, 4)
        assert numerical_rank(rotated) == rank


def test_rank_robustness():
    assert is_rank_robust(torch.diag(torch.tensor([1.0, 1e-14], dtype=torch.float64)), 1e-9)
    assert not is_rank_robust(torch.diag(torch.tensor([1.0, 1e-9], dtype=torch.float64)), 1e-9)


def test_singular_values_descending(generator):
    values = singular_values(torch.randn((5, 3), generator=generator, dtype=torch.float64))
    assert values.shape == (3,)
    assert bool((values[:-1] >= values[1:]).all())


def test_span():
    line = span([[1.0, 0.0], [2.0, 0.0]])
    assert line.dim == 1
    assert abs(line.basis[0, 0].item()) == pytest.approx(1.0)

    empty = span([], ambient_dim=2)
    assert empty.dim == 0 and empty.ambient_dim == 2

    tilted = span([[1.0, 1e-12]], 1e-9)
    assert tilted.dim == 1
    assert abs(abs(tilted.basis[0, 0].item()) - 1.0) < 1e-9
    assert abs(tilted.basis[1, 0].item()) < 1e-9

    with pytest.raises(DimensionMismatch):
        span([])


def test_span_basis_is_orthonormal(generator):
    vectors = [torch.randn(5, generator=generator, dtype=torch.float64) for _ in range(3)]
    subspace = span(vectors)
    assert subspace.dim == 3
    assert torch.allclose(subspace.basis.T @ subspace.basis, torch.eye(3, dtype=torch.float64), atol=1e-12)
    for vector in vectors:
        assert subspace.contains(vector, 1e-10)


def test_projection_and_residual():
    plane = column_span(torch.tensor([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], dtype=torch.float64))
    assert plane.residual([1.0, 2.0, 3.0]) == pytest.approx(3.0)
    assert plane.project([1.0, 2.0, 3.0]).tolist() == pytest.approx([1.0, 2.0, 0.0])
    assert plane.contains([4.0, -1.0, 0.0])
    assert not plane.contains([0.0, 0.0, 1.0])
    with pytest.raises(DimensionMismatch):
        plane.residual([1.0, 2.0])


def test_subspace_distance():
    e1 = span([[1.0, 0.0]])
    e2 = span([[0.0, 1.0]])
    diagonal = span([[1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)]])
    assert subspace_distance(e1, e1) == pytest.approx(0.0, abs=1e-12)
    assert subspace_distance(e1, e2) == pytest.approx(math.pi / 2)
    assert subspace_distance(e1, diagonal) == pytest.approx(math.pi / 4, abs=1e-9)
    assert subspace_distance(e1, span([[1.0, 0.0], [0.0, 1.0]])) == pytest.approx(math.pi / 2)


def test_subspace_distance_ignores_basis_choice(generator):
    vectors = [torch.randn(4, generator=generator, dtype=torch.float64) for _ in range(2)]
    mixed = [vectors[0] + 3 * vectors[1], -vectors[1]]
    assert subspace_distance(span(vectors), span(mixed)) < 1e-7


def test_subspace_distance_is_symmetric(generator):
    for _ in range(30):
        first_dim, second_dim = torch.randint(0, 4, (2,), generator=generator).tolist()
        first = span(list(torch.randn((first_dim, 4), generator=generator, dtype=torch.float64)), ambient_dim=4)
        if torch.rand(1, generator=generator).item() < 0.5:
            perturbation = 1e-4 * torch.randn((4, first.dim), generator=generator, dtype=torch.float64)
            second = column_span(first.basis + perturbation) if first.dim > 0 else span([], ambient_dim=4)
        else:
            second = span(list(torch.randn((second_dim, 4), generator=generator, dtype=torch.float64)), ambient_dim=4)
        assert subspace_distance(first, second) == pytest.approx(subspace_distance(second, first), abs=1e-10)


def test_to_dict():
    description = span([[0.0, 2.0]]).to_dict()
    assert description["dim"] == 1 and description["ambient_dim"] == 2
    assert isinstance(Subspace(torch.zeros((2, 0), dtype=torch.float64), 1e-9).to_dict()["basis"], list)
