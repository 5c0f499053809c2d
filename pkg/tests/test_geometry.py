import math

import pytest
import torch

from expressions import ExprVec
from geometry import (
    INCONCLUSIVE,
    NOT_LINEARIZABLE,
    QUASI_SMOOTH_CANDIDATE,
    REGULAR,
    SMOOTH_LINEARIZABLE,
    STRONGLY_SINGULAR,
    WEAKLY_SINGULAR,
    BracketField,
    CallableField,
    ConstantField,
    ExprField,
    VerdictParameters,
    build_flag,
    classify_point,
    estimate_D,
    jacobian_range,
    lie_bracket,
    linearizability_verdict,
)
from data_module.grids import neighbourhood_grid
from geometry.limit_directions import DEFAULT_LIMIT_TOL
from linear_systems import kalman_controllable, kronecker_data
from models import ControlSystem, LinearPair
from numlin import subspace_distance
from utils.errors import InputError

PLANE = ["x", "y"]


def plane_field(*components: str) -> ExprField:
    return ExprField(ExprVec.parse(list(components), PLANE), PLANE)


def test_lie_bracket():
    first, second = plane_field("y", "0"), plane_field("0", "x")
    assert lie_bracket(first, second, [0.3, -0.7]).tolist() == pytest.approx([-0.3, -0.7])
    assert lie_bracket(first, first, [0.3, -0.7]).tolist() == pytest.approx([0.0, 0.0])
    constant = ConstantField([1.0, 2.0]), ConstantField([-3.0, 0.5])
    assert lie_bracket(*constant, [0.1, 0.2]).tolist() == pytest.approx([0.0, 0.0], abs=1e-9)


def test_nested_brackets_are_exact():
    first, second = plane_field("y", "0"), plane_field("0", "x")
    nested = BracketField(first, BracketField(first, second))
    assert nested.differentiable
    assert nested([0.3, -0.7]).tolist() == pytest.approx([1.4, 0.0], abs=1e-14)


def test_bracket_of_numeric_fields_uses_finite_differences():
    first = CallableField(lambda p: [p[1], 0.0], 2)
    second = plane_field("0", "x")
    assert not BracketField(first, second).differentiable
    assert lie_bracket(first, second, [0.3, -0.7]).tolist() == pytest.approx([-0.3, -0.7], abs=1e-6)


FIELD_TERMS = ["x*y", "sin(y)", "x^2", "exp(x*y)", "cos(x)", "tanh(y - x)", "y^3", "1"]


def random_plane_field(generator) -> ExprField:
    components = []
    for _ in range(2):
        coefficients = (2 * torch.rand(len(FIELD_TERMS), generator=generator, dtype=torch.float64) - 1).tolist()
        components.append(" + ".join(f"{c:.3f}*{term}" for c, term in zip(coefficients, FIELD_TERMS)))
    return plane_field(*components)


def test_lie_bracket_is_antisymmetric(generator):
    for _ in range(30):
        first, second = random_plane_field(generator), random_plane_field(generator)
        point = (2 * torch.rand(2, generator=generator, dtype=torch.float64) - 1).tolist()
        forward, backward = lie_bracket(first, second, point), lie_bracket(second, first, point)
        assert torch.allclose(forward, -backward, rtol=0.0, atol=1e-10)
        assert torch.allclose(lie_bracket(first, first, point), torch.zeros(2, dtype=torch.float64), atol=1e-10)


def cubic_pair_system() -> ControlSystem:
    return ControlSystem.from_strings("strong", ["x"], ["u1", "u2"], ["u1^3"], {"u1": (-1.0, 1.0), "u2": (-1.0, 1.0)})


def test_estimate_D(load_system):
    cubic = load_system("cubic")
    assert estimate_D(cubic, [0.0], [0.0]).dim == 1

    linear = ControlSystem.from_strings("linear", ["x1", "x2"], ["u"], ["u", "2*u"])
    D = estimate_D(linear, [0.3, 0.1], [0.2])
    assert subspace_distance(D, jacobian_range(linear, [0.3, 0.1], [0.2])) < 1e-9

    identity = ControlSystem.from_strings("identity", ["x1", "x2"], ["u1", "u2"], ["u1", "u2"])
    assert estimate_D(identity, [0.0, 0.0], [0.0, 0.0]).dim == 2


def test_estimate_D_rejects_bad_schedule(load_system):
    with pytest.raises(InputError):
        estimate_D(load_system("cubic"), [0.0], [0.0], radius_schedule=[1e-3, 1e-2])


def test_D_is_jacobian_range_at_regular_points(load_system, generator):
    cases = [("cubic", 0.5), ("pendulum", 0.0), ("example53", 0.5), ("brunovsky2", 0.0), ("pm1", 0.0)]
    for name, control_offset in cases:
        system = load_system(name)
        for _ in range(10):
            x = (0.5 * (2 * torch.rand(system.n, generator=generator, dtype=torch.float64) - 1)).tolist()
            u = (0.2 * torch.rand(system.m, generator=generator, dtype=torch.float64) + control_offset).tolist()
            D = estimate_D(system, x, u)
            assert subspace_distance(D, jacobian_range(system, x, u)) <= 1e-3, (name, x, u)


def test_jacobian_range_is_contained_in_D(load_system, generator):
    for name in ["cubic", "example53", "square", "nonflat", "pendulum"]:
        system = load_system(name)
        for _ in range(10):
            x = (2 * torch.rand(system.n, generator=generator, dtype=torch.float64) - 1).tolist()
            u = (2 * torch.rand(system.m, generator=generator, dtype=torch.float64) - 1).tolist()
            # singular controls are hit deliberately
            u[0] = 0.0
            D = estimate_D(system, x, u)
            for vector in jacobian_range(system, x, u).basis.T:
                assert D.residual(vector) < 1e-6


def test_D_is_larger_than_jacobian_range_at_singular_point(load_system):
    cubic = load_system("cubic")
    assert estimate_D(cubic, [0.0], [0.0]).dim == 1
    assert jacobian_range(cubic, [0.0], [0.0]).dim == 0


def test_limit_directions_are_cut_at_the_limit_tolerance():
    assert VerdictParameters().limit_tol == DEFAULT_LIMIT_TOL
    states, controls = ["x1", "x2", "x3"], ["u1", "u2"]
    system = ControlSystem.from_strings("curved", states, controls, ["u1 + u2^2", "u2 + u1^2", "u1*u2"])
    x, u = [0.0, 0.0, 0.0], [0.3, -0.2]
    D = estimate_D(system, x, u)
    assert D.dim == 2
    assert subspace_distance(D, jacobian_range(system, x, u)) < 1e-6


def test_classify_point(load_system):
    cubic = load_system("cubic")
    point_class = classify_point(cubic, [0.0], [0.0])
    assert point_class.tag == WEAKLY_SINGULAR
    assert point_class.rank_at_point == 0 and point_class.sup_rank_nbhd == 1
    assert classify_point(cubic, [0.0], [0.5]).tag == REGULAR
    assert classify_point(cubic_pair_system(), [0.0], [0.0, 0.0]).tag == STRONGLY_SINGULAR
    assert classify_point(load_system("pendulum"), [0.0, 0.0], [0.0]).regular


def test_classify_point_needs_room_in_the_box(load_system):
    with pytest.raises(InputError):
        classify_point(load_system("cubic"), [0.0], [0.95])


def test_flag_ranks_match_kronecker_data(generator):
    params = VerdictParameters(grid=2, state_grid=2, control_grid=2, n_directions=4)
    checked = 0
    while checked < 20:
        n = int(torch.randint(1, 4, (1,), generator=generator).item())
        m = int(torch.randint(1, n + 1, (1,), generator=generator).item())
        A = 2 * torch.rand((n, n), generator=generator, dtype=torch.float64) - 1
        B = 2 * torch.rand((n, m), generator=generator, dtype=torch.float64) - 1
        pair = LinearPair(A, B)
        if not kalman_controllable(pair)[1]:
            continue
        system = pair.to_control_system()
        x, u = [0.0] * n, [0.0] * m
        report = build_flag(system, x, u, params=params)
        ranks = kronecker_data(pair).r
        for level in report.levels:
            assert level.rank_at_point == level.min_rank == level.max_rank == ranks[level.level + 1]
        assert report.condition3
        checked += 1


@pytest.mark.parametrize("name", ["pendulum", "nonflat", "brunovsky2", "example53"])
def test_flag_ranks_grow_along_the_levels(load_file, name):
    system_file = load_file(name)
    system = system_file.system()
    x, u = system_file.base_point()
    params = VerdictParameters(grid=2, state_grid=2, control_grid=2, n_directions=4)
    previous = (0, 0, 0)
    for level in build_flag(system, x, u, params=params).levels:
        ranks = (level.rank_at_point, level.min_rank, level.max_rank)
        assert all(a <= b <= system.n for a, b in zip(previous, ranks)), (name, level.level)
        assert level.min_rank <= level.rank_at_point <= level.max_rank
        previous = ranks


def test_flag_of_pendulum(load_system):
    system = load_system("pendulum")
    report = build_flag(system, [0.0, 0.0], [0.0])
    assert report.basis_source == "jacobian_columns"
    assert [level.rank_at_point for level in report.levels] == [1, 2]
    assert report.condition1 and report.condition2 and report.condition3


def test_flag_of_nonflat_system_has_jumping_rank(load_system):
    report = build_flag(load_system("nonflat"), [0.0, 0.0], [0.0])
    assert not report.condition3
    assert report.levels[1].rank_at_point == 1
    assert report.levels[1].max_rank == 2


@pytest.mark.parametrize(
    "name, point, tag",
    [
        ("cubic", [0.0, 0.0], QUASI_SMOOTH_CANDIDATE),
        ("cubic", [0.0, 0.5], SMOOTH_LINEARIZABLE),
        ("pendulum", [0.0, 0.0, 0.0], SMOOTH_LINEARIZABLE),
        ("example53", [0.0, 0.0, 0.0, 0.0], QUASI_SMOOTH_CANDIDATE),
        ("square", [0.0, 0.0], NOT_LINEARIZABLE),
        ("nonflat", [0.0, 0.0, 0.0], NOT_LINEARIZABLE),
        ("brunovsky2", [0.0, 0.0, 0.0], SMOOTH_LINEARIZABLE),
    ],
)
def test_verdict(load_system, name, point, tag):
    system = load_system(name)
    report = linearizability_verdict(system, point[: system.n], point[system.n :])
    assert report.tag == tag
    assert report.tag != INCONCLUSIVE


def test_smooth_verdict_at_equilibrium_has_controllable_linear_approximation(load_system):
    report = linearizability_verdict(load_system("pendulum"), [0.0, 0.0], [0.0])
    assert report.linear_approximation_controllable


def test_verdict_report_is_serializable(load_system):
    payload = linearizability_verdict(load_system("cubic"), [0.0], [0.0]).to_dict()
    assert payload["tag"] == QUASI_SMOOTH_CANDIDATE
    assert payload["point_class"]["tag"] == WEAKLY_SINGULAR
    assert payload["fibration_surrogate"]["passed"]
    assert math.isfinite(payload["condition1_distance"])


def test_neighbourhood_grid_is_box_normalized(load_system):
    system = load_system("example53")
    points = neighbourhood_grid(system, system.states, [0.0, 0.0], 0.1, 3)
    assert len(points) == 9
    assert max(abs(p[0]) for p in points) == pytest.approx(0.4)
