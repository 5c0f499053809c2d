"""Plain-text system definitions.

One ``key = value`` pair per line, ``#`` starts a comment. Expression lists are separated by ``;``,
number lists by ``,`` and matrices are rows of numbers separated by ``;`` (``A = 0,0; 1,0``)::

    name = cubic
    states = x
    controls = u
    f = u^3
    point = 0, 0
    box.x = -1, 1
    box.u = -1, 1
    chi_I = x
    chi_II = u^3
    A = 0
    B = 1

Optional keys: ``chi_I_inverse`` (χ_I⁻¹ in the target states z1..zn) and ``switch`` (a 2 × m
matrix of constant controls whose drift fields are chattered).
"""
import logging
from dataclasses import dataclass, field
from os.path import basename, exists, splitext
from typing import Dict, List, Optional, Tuple

import torch

from dynamics.conjugation import Conjugation
from models import ControlSystem, LinearPair
from utils.errors import InputError, SystemFileError

logger = logging.getLogger(__name__)

LIST_KEYS = ("states", "controls", "f", "chi_I", "chi_II", "chi_I_inverse")
NUMBER_KEYS = ("point",)
MATRIX_KEYS = ("A", "B", "switch")
BOX_PREFIX = "box."


def split_items(text: str, separator: str) -> List[str]:
    items = [item.strip() for item in text.split(separator)]
    if any(len(item) == 0 for item in items):
        raise SystemFileError(f"Empty item in {text!r}")
    return items


def parse_numbers(text: str) -> List[float]:
    try:
        return [float(item) for item in split_items(text, ",")]
    except ValueError:
        raise SystemFileError(f"Expected comma separated numbers, got {text!r}")


def parse_matrix(text: str) -> torch.Tensor:
    """``"0,0;1,0"`` -> [[0, 0], [1, 0]]"""
    rows = [parse_numbers(row) for row in split_items(text, ";")]
    if len({len(row) for row in rows}) != 1:
        raise SystemFileError(f"Rows of {text!r} have different lengths")
    return torch.tensor(rows, dtype=torch.float64)


@dataclass
class SystemFile:
    name: str
    states: List[str] = field(default_factory=list)
    controls: List[str] = field(default_factory=list)
    f: List[str] = field(default_factory=list)
    point: Optional[List[float]] = None
    box: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    chi_I: Optional[List[str]] = None
    chi_II: Optional[List[str]] = None
    chi_I_inverse: Optional[List[str]] = None
    A: Optional[torch.Tensor] = None
    B: Optional[torch.Tensor] = None
    switch: Optional[torch.Tensor] = None

    @staticmethod
    def read(path: str) -> "SystemFile":
        if not exists(path):
            raise SystemFileError(f"Can't find system file: {path}")
        with open(path, "r", encoding="utf-8") as system_file:
            text = system_file.read()
        return SystemFile.parse(text, splitext(basename(path))[0])

    @staticmethod
    def parse(text: str, default_name: str = "system") -> "SystemFile":
        values: Dict[str, str] = {}
        for line_number, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if len(line) == 0:
                continue
            if "=" not in line:
                raise SystemFileError(f"Line {line_number}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in values:
                raise SystemFileError(f"Line {line_number}: duplicate key {key}")
            values[key] = value

        result = SystemFile(values.pop("name", default_name))
        for key, value in values.items():
            if key in LIST_KEYS:
                separator = ";" if key in ("f", "chi_I", "chi_II", "chi_I_inverse") else ","
                setattr(result, key, split_items(value, separator))
            elif key in NUMBER_KEYS:
                setattr(result, key, parse_numbers(value))
            elif key in MATRIX_KEYS:
                setattr(result, key, parse_matrix(value))
            elif key.startswith(BOX_PREFIX):
                bounds = parse_numbers(value)
                if len(bounds) != 2:
                    raise SystemFileError(f"{key} needs two bounds, got {len(bounds)}")
                result.box[key[len(BOX_PREFIX) :]] = (bounds[0], bounds[1])
            else:
                raise SystemFileError(f"Unknown key: {key}")
        result.validate()
        return result

    @property
    def has_system(self) -> bool:
        return len(self.f) > 0

    def validate(self):
        if not self.has_system:
            if self.A is None or self.B is None:
                raise SystemFileError(f"{self.name}: needs either states, controls and f or a pair A, B")
            return
        if len(self.states) == 0 or len(self.controls) == 0:
            raise SystemFileError(f"{self.name}: states and controls must both be declared")
        if len(self.f) != len(self.states):
            raise SystemFileError(f"{self.name}: f has {len(self.f)} components for {len(self.states)} states")
        for name in self.box:
            if name not in self.states and name not in self.controls:
                raise SystemFileError(f"{self.name}: box given for undeclared symbol {name}")
        if self.point is not None and len(self.point) != len(self.states) + len(self.controls):
            raise SystemFileError(
                f"{self.name}: point has {len(self.point)} entries for n + m = {len(self.states) + len(self.controls)}"
            )
        if (self.chi_I is None) != (self.chi_II is None):
            raise SystemFileError(f"{self.name}: chi_I and chi_II must be given together")
        if self.switch is not None and tuple(self.switch.shape) != (2, len(self.controls)):
            raise SystemFileError(f"{self.name}: switch must be a 2 x {len(self.controls)} matrix of controls")

    def system(self) -> ControlSystem:
        if not self.has_system:
            raise SystemFileError(f"{self.name} defines no control system")
        system = ControlSystem.from_strings(self.name, self.states, self.controls, self.f, self.box)
        if self.point is not None and not system.contains(system.symbols.names, self.point):
            raise SystemFileError(f"{self.name}: point {self.point} is outside the domain box")
        logger.debug(f"Loaded {system!r}")
        return system

    def base_point(self) -> Tuple[List[float], List[float]]:
        n, m = len(self.states), len(self.controls)
        point = self.point if self.point is not None else [0.0] * (n + m)
        return list(point[:n]), list(point[n:])

    def pair(self) -> LinearPair:
        if self.A is None or self.B is None:
            raise SystemFileError(f"{self.name} defines no linear pair A, B")
        try:
            return LinearPair(self.A, self.B)
        except InputError as error:
            raise SystemFileError(f"{self.name}: {error}")

    def conjugation(self, system: Optional[ControlSystem] = None) -> Conjugation:
        if self.chi_I is None or self.chi_II is None:
            raise SystemFileError(f"{self.name} defines no conjugation chi_I, chi_II")
        return Conjugation.from_strings(system or self.system(), self.chi_I, self.chi_II, self.chi_I_inverse)
