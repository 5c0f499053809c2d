import pytest
import torch

from linear_systems import (
    brunovsky,
    chain_lengths,
    kalman_controllable,
    kronecker_data,
    layer_permutation,
    layer_sizes,
    layered_canonical_form,
    linearly_conjugate,
)
from models import LinearPair
from utils.errors import NotControllable

DOUBLE_INTEGRATOR = LinearPair([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]])
# linear approximation at 0 of the two-input example
KAPPA_2_0 = LinearPair([[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]])
KAPPA_1_1 = LinearPair(torch.zeros((2, 2)), torch.eye(2))


def random_pair(generator: torch.Generator, n: int, m: int) -> LinearPair:
    A = 2 * torch.rand((n, n), generator=generator, dtype=torch.float64) - 1
    B = 2 * torch.rand((n, m), generator=generator, dtype=torch.float64) - 1
    return LinearPair(A, B)


def random_feedback(generator: torch.Generator, n: int, m: int):
    P = torch.eye(n, dtype=torch.float64) + 0.3 * torch.rand((n, n), generator=generator, dtype=torch.float64)
    K = torch.rand((m, n), generator=generator, dtype=torch.float64)
    Q = torch.eye(m, dtype=torch.float64) + 0.3 * torch.rand((m, m), generator=generator, dtype=torch.float64)
    return P, K, Q


def random_controllable_pairs(generator: torch.Generator, count: int, max_n: int, max_m: int):
    pairs = []
    while len(pairs) < count:
        n = int(torch.randint(1, max_n + 1, (1,), generator=generator).item())
        m = int(torch.randint(1, min(n, max_m) + 1, (1,), generator=generator).item())
        pair = random_pair(generator, n, m)
        if kalman_controllable(pair)[1]:
            pairs.append(pair)
    return pairs


def test_kalman_controllable():
    assert kalman_controllable(LinearPair([[0.0]], [[1.0]])) == (1, True)
    assert kalman_controllable(DOUBLE_INTEGRATOR) == (2, True)
    assert kalman_controllable(LinearPair(torch.eye(2), torch.zeros((2, 1)))) == (0, False)


def test_kronecker_data():
    data = kronecker_data(DOUBLE_INTEGRATOR)
    assert data.kappa == [2]
    assert data.r == [0, 1, 2]
    assert data.controllable

    data = kronecker_data(KAPPA_2_0)
    assert data.kappa == [2, 0]
    assert data.s[:3] == [2, 1, 1]
    assert data.controllable

    assert kronecker_data(KAPPA_1_1).kappa == [1, 1]

    data = kronecker_data(LinearPair([[1.0, 2.0], [3.0, 4.0]], torch.zeros((2, 2))))
    assert data.kappa == [0, 0]
    assert not data.controllable


def test_kronecker_invariants(generator):
    for pair in random_controllable_pairs(generator, 50, 6, 3):
        data = kronecker_data(pair)
        assert sum(data.kappa) == pair.n
        assert data.kappa == sorted(data.kappa, reverse=True)
        assert all(a >= b for a, b in zip(data.s[1:], data.s[2:]))
        for k in range(1, len(data.s)):
            assert data.s[k] == sum(1 for kappa in data.kappa if kappa >= k)
        assert data.sigma[0] == pair.n + pair.m


def test_brunovsky_of_canonical_pair():
    result = brunovsky(DOUBLE_INTEGRATOR)
    assert result.kappa == [2]
    assert torch.equal(result.Ac, DOUBLE_INTEGRATOR.A)
    assert torch.equal(result.Bc, DOUBLE_INTEGRATOR.B)
    assert max(result.residual(DOUBLE_INTEGRATOR)) < 1e-12


def test_brunovsky_single_chain():
    pair = LinearPair([[0.0, 0.0], [1.0, 0.0]], [[1.0], [0.0]])
    result = brunovsky(pair)
    assert result.kappa == [2]
    assert result.Ac.tolist() == [[0.0, 1.0], [0.0, 0.0]]
    assert result.Bc.tolist() == [[0.0], [1.0]]
    assert max(result.residual(pair)) < 1e-12


def test_brunovsky_two_chains():
    result = brunovsky(KAPPA_2_0)
    assert result.kappa == [2, 0]
    assert max(result.residual(KAPPA_2_0)) < 1e-12
    assert torch.linalg.matrix_rank(result.Q).item() == 2


def test_brunovsky_random_round_trip(generator):
    for pair in random_controllable_pairs(generator, 100, 6, 3):
        result = brunovsky(pair)
        assert max(result.residual(pair)) <= 1e-8
        assert result.kappa == kronecker_data(pair).kappa


def test_brunovsky_of_brunovsky_form_is_itself(generator):
    for pair in random_controllable_pairs(generator, 30, 6, 3):
        result = brunovsky(pair)
        again = brunovsky(LinearPair(result.Ac, result.Bc))
        assert again.kappa == result.kappa
        assert torch.allclose(again.Ac, result.Ac, rtol=0.0, atol=1e-12)
        assert torch.allclose(again.Bc, result.Bc, rtol=0.0, atol=1e-12)


def test_brunovsky_rejects_uncontrollable():
    with pytest.raises(NotControllable):
        brunovsky(LinearPair(torch.eye(2), torch.tensor([[1.0], [0.0]])))


def test_chain_lengths_keep_column_order():
    assert chain_lengths(KAPPA_2_0) == [2, 0]
    swapped = LinearPair(KAPPA_2_0.A, KAPPA_2_0.B[:, [1, 0]])
    assert chain_lengths(swapped) == [0, 2]
    assert brunovsky(swapped).kappa == [2, 0]


def test_layered_form():
    pair = LinearPair([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
    result = layered_canonical_form(pair)
    assert result.form == "layered"
    assert result.kappa == [2, 1]
    assert max(result.residual(pair)) < 1e-12
    # the deepest layer is driven by the controls only through the next layer
    assert result.Bc.tolist() == [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
    assert layer_sizes(result.kappa) == (2, 1)


def test_layered_form_random(generator):
    for pair in random_controllable_pairs(generator, 20, 5, 3):
        assert max(layered_canonical_form(pair).residual(pair)) <= 1e-8


def test_linearly_conjugate():
    assert linearly_conjugate(KAPPA_2_0, KAPPA_2_0)
    assert not linearly_conjugate(KAPPA_2_0, KAPPA_1_1)
    assert not linearly_conjugate(DOUBLE_INTEGRATOR, KAPPA_1_1)
    with pytest.raises(NotControllable):
        linearly_conjugate(KAPPA_1_1, LinearPair(torch.zeros((2, 2)), torch.tensor([[1.0, 0.0], [0.0, 0.0]])))


def test_conjugate_under_feedback_transformations(generator):
    for pair in random_controllable_pairs(generator, 10, 4, 2):
        assert linearly_conjugate(pair, pair.transformed(*random_feedback(generator, pair.n, pair.m)))


def test_conjugacy_is_an_equivalence(generator):
    pool = [KAPPA_2_0, KAPPA_1_1]
    for canonical in (KAPPA_2_0, KAPPA_1_1):
        pool += [canonical.transformed(*random_feedback(generator, 2, 2)) for _ in range(2)]
    pool += [random_pair(generator, 2, 2) for _ in range(3)]
    for first in pool:
        assert linearly_conjugate(first, first)
        for second in pool:
            assert linearly_conjugate(first, second) == linearly_conjugate(second, first)
            for third in pool:
                if linearly_conjugate(first, second) and linearly_conjugate(second, third):
                    assert linearly_conjugate(first, third)


def test_feedback_chains_stay_conjugate(generator):
    for pair in random_controllable_pairs(generator, 10, 4, 2):
        second = pair.transformed(*random_feedback(generator, pair.n, pair.m))
        third = second.transformed(*random_feedback(generator, pair.n, pair.m))
        assert linearly_conjugate(second, pair) and linearly_conjugate(third, second)
        assert linearly_conjugate(pair, third) and linearly_conjugate(third, pair)


def test_layer_permutation_interleaves_chains():
    permutation = layer_permutation([2, 2])
    assert [row.argmax().item() for row in permutation] == [0, 2, 1, 3]
    assert layer_sizes([3, 1, 0]) == (2, 1, 1)


def test_two_input_example_is_not_conjugate_to_its_linear_approximation(load_file):
    system_file = load_file("example53")
    approximation = system_file.system().linear_approximation([0.0, 0.0], [0.0, 0.0])
    assert torch.equal(approximation.A, KAPPA_2_0.A)
    assert torch.equal(approximation.B, KAPPA_2_0.B)
    assert kronecker_data(approximation).kappa == [2, 0]
    assert kronecker_data(system_file.pair()).kappa == [1, 1]
    assert not linearly_conjugate(approximation, system_file.pair())
