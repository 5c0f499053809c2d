import math
from os import listdir

import pytest
import torch

from conftest import SYSTEMS_DIR, system_path
from data_module.grids import box_grid, box_interval, capped_count
from data_module.system_file import SystemFile, parse_matrix, parse_numbers, split_items
from models import ControlSystem
from utils.errors import SystemFileError

CUBIC = """
# comment line
states = x
controls = u
f = u^3   # trailing comment
box.x = -1, 1
box.u = -1, 1
"""


def test_parse_minimal_system():
    system_file = SystemFile.parse(CUBIC, "cubic")
    assert system_file.name == "cubic"
    assert system_file.f == ["u^3"]
    assert system_file.box == {"x": (-1.0, 1.0), "u": (-1.0, 1.0)}
    assert system_file.base_point() == ([0.0], [0.0])
    system = system_file.system()
    assert system.evaluate([0.0], [0.5]) == [0.125]


def test_parse_items():
    assert split_items("x1 + 1; -sin(x2)", ";") == ["x1 + 1", "-sin(x2)"]
    assert parse_numbers(" 0, -1.5,2e-1 ") == [0.0, -1.5, 0.2]
    assert torch.equal(parse_matrix("0,0; 1,0"), torch.tensor([[0.0, 0.0], [1.0, 0.0]], dtype=torch.float64))


def test_pair_only_file():
    system_file = SystemFile.parse("A = 0,1; 0,0\nB = 0; 1")
    assert not system_file.has_system
    assert system_file.pair().n == 2
    with pytest.raises(SystemFileError):
        system_file.system()
    with pytest.raises(SystemFileError):
        system_file.conjugation()


@pytest.mark.parametrize(
    "text",
    [
        "states = x\ncontrols = u\nf = u\nf = u",
        "states = x\ncontrols = u\nf = u\nmass = 1",
        "states = x\ncontrols = u\nf u",
        "states = x\ncontrols = u\nf = u;",
        "states = x\ncontrols = u\nf = u; x",
        "states = x\nf = x",
        "states = x\ncontrols = u\nf = u\nbox.y = -1, 1",
        "states = x\ncontrols = u\nf = u\nbox.x = -1",
        "states = x\ncontrols = u\nf = u\npoint = 0",
        "states = x\ncontrols = u\nf = u\npoint = 0, a",
        "states = x\ncontrols = u\nf = u\nchi_I = x",
        "states = x\ncontrols = u\nf = u\nswitch = 1",
        "A = 0,1; 0\nB = 0; 1",
        "B = 1",
        "",
    ],
)
def test_malformed_files(text):
    with pytest.raises(SystemFileError):
        SystemFile.parse(text)


def test_point_outside_box():
    with pytest.raises(SystemFileError):
        SystemFile.parse(CUBIC + "point = 2, 0").system()


def test_mismatched_pair():
    with pytest.raises(SystemFileError):
        SystemFile.parse("A = 0,1; 0,0\nB = 1").pair()


def test_missing_file(tmp_path):
    with pytest.raises(SystemFileError):
        SystemFile.read(str(tmp_path / "absent.sys"))


def test_read_takes_name_from_file(tmp_path):
    path = tmp_path / "scalar.sys"
    path.write_text(CUBIC)
    assert SystemFile.read(str(path)).name == "scalar"
    assert SystemFile.read(system_path("example53")).name == "example53"


@pytest.mark.parametrize("file_name", sorted(listdir(SYSTEMS_DIR)))
def test_shipped_systems_load(file_name):
    system_file = SystemFile.read(f"{SYSTEMS_DIR}/{file_name}")
    system = system_file.system()
    x, u = system_file.base_point()
    assert system.contains(system.states, x)
    if system_file.A is not None:
        assert system_file.pair().n == system.n
    if system_file.chi_I is not None:
        assert system_file.conjugation(system).triangular
    if system_file.switch is not None:
        assert tuple(system_file.switch.shape) == (2, system.m)


# ========== Grids ==========


def test_box_grid_keeps_half_bounded_axes_inside_the_box():
    box = {"x": (0.0, math.inf), "y": (-math.inf, 1.0)}
    system = ControlSystem.from_strings("half", ["x", "y"], ["u"], ["u", "x"], box)
    points = box_grid(system, ["x", "y", "u"], 5)
    assert len(points) == 125
    assert all(system.contains(["x", "y", "u"], point, slack=0.0) for point in points)
    assert min(p[0] for p in points) == 0.0 and max(p[0] for p in points) == pytest.approx(2.0)
    assert min(p[1] for p in points) == pytest.approx(-1.0) and max(p[1] for p in points) == 1.0
    assert min(p[2] for p in points) == -1.0 and max(p[2] for p in points) == 1.0


@pytest.mark.parametrize(
    "lo, hi, expected", [(-3.0, 4.0, (-3.0, 4.0)), (0.5, math.inf, (0.5, 2.5)), (-math.inf, -1.0, (-3.0, -1.0))]
)
def test_box_interval(lo, hi, expected):
    assert box_interval(lo, hi) == expected
    assert box_interval(-math.inf, math.inf) == (-1.0, 1.0)


@pytest.mark.parametrize(
    "count, dims, max_samples, expected",
    [
        (101, 2, 10201, 101),
        (101, 3, 10201, 21),
        (101, 4, 10201, 10),
        (11, 4, 10201, 10),
        (5, 4, 10201, 5),
        (101, 1, 10201, 101),
        (101, 40, 10201, 2),
        (101, 4, None, 101),
    ],
)
def test_capped_count(count, dims, max_samples, expected):
    per_axis = capped_count(count, dims, max_samples)
    assert per_axis == expected
    if max_samples is not None and per_axis > 2:
        assert per_axis**dims <= max_samples
