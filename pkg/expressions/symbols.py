import re
from typing import Dict, Iterator, Mapping, Sequence, Tuple

from expressions.dual import Number
from utils.errors import DimensionMismatch, InputError, UnknownSymbol

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")
RESERVED = frozenset(["sin", "cos", "exp", "tanh", "sqrt"])


class SymbolTable:
    """Ordered state and control names of a system, states first."""

    def __init__(self, states: Sequence[str], controls: Sequence[str] = ()):
        names = list(states) + list(controls)
        if len(names) == 0:
            raise InputError("Symbol table must not be empty")
        if len(set(names)) != len(names):
            raise InputError(f"Symbols must be distinct, got {', '.join(names)}")
        for name in names:
            if not _IDENTIFIER.match(name) or name in RESERVED:
                raise InputError(f"Invalid symbol name: {name!r}")
        self._states = tuple(states)
        self._controls = tuple(controls)
        self._index = {name: i for i, name in enumerate(names)}

    @property
    def states(self) -> Tuple[str, ...]:
        return self._states

    @property
    def controls(self) -> Tuple[str, ...]:
        return self._controls

    @property
    def names(self) -> Tuple[str, ...]:
        return self._states + self._controls

    def index_of(self, name: str) -> int:
        if name not in self._index:
            raise UnknownSymbol(name)
        return self._index[name]

    def point(self, x: Sequence[Number], u: Sequence[Number] = ()) -> Dict[str, Number]:
        if len(x) != len(self._states) or len(u) != len(self._controls):
            raise DimensionMismatch(
                f"Expected {len(self._states)} states and {len(self._controls)} controls, got {len(x)} and {len(u)}"
            )
        env = dict(zip(self._states, x))
        env.update(zip(self._controls, u))
        return env

    def split(self, point: Mapping[str, Number]) -> Tuple[list, list]:
        return [point[s] for s in self._states], [point[c] for c in self._controls]

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __len__(self) -> int:
        return len(self._index)

    def __repr__(self) -> str:
        return f"SymbolTable(states={list(self._states)}, controls={list(self._controls)})"
