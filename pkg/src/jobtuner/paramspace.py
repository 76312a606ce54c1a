"""Tunable parameter spaces.

Defines typed parameter specs, trial points, the line-oriented parameter
file format, exhaustive grid enumeration, and the codec between native
parameter values and the normalized unit cube the optimizers search.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    DuplicateParamError,
    EmptySpaceError,
    GridTooLargeError,
    InvalidPointError,
    ParamSyntaxError,
)

Value = int | float | str

KIND_INT = "int"
KIND_FLOAT = "float"
KIND_CAT = "cat"

DEFAULT_GRID_CAP = 1_000_000

# Slack for counting lattice steps across float ranges; (upper-lower)/step
# lands just under a whole number when step has no exact binary form.
_COUNT_EPS = 1e-9


def _round_half_away(x: float) -> int:
    """Round to nearest integer, ties away from zero (locale-free)."""
    if x >= 0:
        return int(math.floor(x + 0.5))
    return int(math.ceil(x - 0.5))


def _wholenum(raw: str) -> int:
    v = float(raw)
    if not v.is_integer():
        raise ValueError(f"{raw!r} is not a whole number")
    return int(v)


@dataclass(frozen=True)
class ParamSpec:
    """One tunable configuration key, e.g. a Hadoop property.

    Numeric kinds carry inclusive bounds and a positive step that defines
    both the exhaustive-grid stride and the snap lattice. Categorical kinds
    carry an ordered list of distinct string values.
    """

    name: str
    kind: str
    lower: int | float | None = None
    upper: int | float | None = None
    step: int | float | None = None
    values: tuple[str, ...] = ()
    default: Value | None = None
    unit: str | None = None

    def __post_init__(self):
        if not self.name or re.search(r"\s", self.name):
            raise DomainError(f"parameter name {self.name!r} is empty or has whitespace")
        if self.kind not in (KIND_INT, KIND_FLOAT, KIND_CAT):
            raise DomainError(f"{self.name}: unknown kind {self.kind!r}")

        if self.kind == KIND_CAT:
            if not self.values:
                raise DomainError(f"{self.name}: categorical needs at least one value")
            if len(set(self.values)) != len(self.values):
                raise DomainError(f"{self.name}: categorical values must be distinct")
            if self.default is None:
                object.__setattr__(self, "default", self.values[0])
            elif self.default not in self.values:
                raise DomainError(f"{self.name}: default {self.default!r} not among values")
            return

        if self.lower is None or self.upper is None or self.step is None:
            raise DomainError(f"{self.name}: numeric kind needs lower, upper and step")
        if self.lower > self.upper:
            raise DomainError(f"{self.name}: lower {self.lower} > upper {self.upper}")
        if self.step <= 0:
            raise DomainError(f"{self.name}: step must be > 0, got {self.step}")

        if self.kind == KIND_INT:
            for label, v in (("lower", self.lower), ("upper", self.upper), ("step", self.step)):
                if float(v) != int(v):
                    raise DomainError(f"{self.name}: integer {label} must be whole, got {v}")
            object.__setattr__(self, "lower", int(self.lower))
            object.__setattr__(self, "upper", int(self.upper))
            object.__setattr__(self, "step", int(self.step))
            if self.default is not None and float(self.default) != int(self.default):
                raise DomainError(f"{self.name}: integer default must be whole, got {self.default}")
        else:
            object.__setattr__(self, "lower", float(self.lower))
            object.__setattr__(self, "upper", float(self.upper))
            object.__setattr__(self, "step", float(self.step))

        if self.default is None:
            object.__setattr__(self, "default", self.lower)
        else:
            d = int(self.default) if self.kind == KIND_INT else float(self.default)
            object.__setattr__(self, "default", d)
            if not (self.lower <= d <= self.upper):
                raise DomainError(
                    f"{self.name}: default {d} outside [{self.lower}, {self.upper}]"
                )

    # -- lattice helpers ------------------------------------------------

    def lattice_count(self) -> int:
        """Number of grid values: lower, lower+step, ... <= upper (or len(values))."""
        if self.kind == KIND_CAT:
            return len(self.values)
        if self.kind == KIND_INT:
            return (self.upper - self.lower) // self.step + 1
        k = int(math.floor((self.upper - self.lower) / self.step + _COUNT_EPS))
        while k > 0 and self.lower + k * self.step > self.upper + _COUNT_EPS * max(1.0, abs(self.upper)):
            k -= 1
        return k + 1

    def lattice_value(self, k: int) -> Value:
        """The k-th grid value in canonical form."""
        if self.kind == KIND_CAT:
            return self.values[k]
        if self.kind == KIND_INT:
            return self.lower + k * self.step
        return self.lower + k * self.step

    def snap(self, v: float) -> Value:
        """Snap a numeric value onto the step lattice, staying inside bounds."""
        k = _round_half_away((v - self.lower) / self.step)
        k = min(max(k, 0), self.lattice_count() - 1)
        return self.lattice_value(k)

    def grid_values(self) -> list[Value]:
        return [self.lattice_value(k) for k in range(self.lattice_count())]

    # -- value codec -------------------------------------------------------

    def check_value(self, v: Value) -> str | None:
        """Return a violation message for v, or None when v is in the domain."""
        if self.kind == KIND_CAT:
            if v not in self.values:
                return f"{self.name}: value {v!r} not among declared values"
            return None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            return f"{self.name}: value {v!r} is not numeric"
        if not (self.lower <= v <= self.upper):
            return f"{self.name}: value {v} out of range [{self.lower}, {self.upper}]"
        if self.kind == KIND_INT:
            if float(v) != int(v):
                return f"{self.name}: value {v} is not an integer"
            if (int(v) - self.lower) % self.step != 0:
                return f"{self.name}: value {v} not on lattice {self.lower}+k*{self.step}"
        return None

    def encode_value(self, v: Value) -> float:
        """Map a domain value to [0, 1]."""
        if self.kind == KIND_CAT:
            n = len(self.values)
            if n == 1:
                return 0.0
            return self.values.index(v) / (n - 1)
        if self.upper == self.lower:
            return 0.0
        return (float(v) - self.lower) / (self.upper - self.lower)

    def decode_unit(self, u: float) -> Value:
        """Map a unit coordinate (clamped to [0, 1]) back to a snapped domain value."""
        u = min(max(u, 0.0), 1.0)
        if self.kind == KIND_CAT:
            n = len(self.values)
            if n == 1:
                return self.values[0]
            idx = _round_half_away(u * (n - 1))
            return self.values[min(max(idx, 0), n - 1)]
        v = self.lower + u * (self.upper - self.lower)
        return self.snap(v)

    def render(self, v: Value) -> str:
        """Canonical string form: ints without decimal point, floats shortest-roundtrip."""
        if self.kind == KIND_INT:
            return str(int(v))
        if self.kind == KIND_FLOAT:
            return repr(float(v))
        return str(v)


@dataclass(frozen=True)
class TrialPoint:
    """One parameter assignment; immutable after construction."""

    assignment: Mapping[str, Value]

    def __post_init__(self):
        object.__setattr__(self, "assignment", MappingProxyType(dict(self.assignment)))

    def __getitem__(self, name: str) -> Value:
        return self.assignment[name]

    def as_dict(self) -> dict[str, Value]:
        return dict(self.assignment)

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.assignment.items())
        return f"TrialPoint({inner})"


@dataclass(frozen=True)
class ParamSpace:
    """Ordered collection of ParamSpecs; the unit of every tuning session."""

    specs: tuple[ParamSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "specs", tuple(self.specs))
        if not self.specs:
            raise EmptySpaceError("a parameter space needs at least one parameter")
        seen = set()
        for s in self.specs:
            if s.name in seen:
                raise DuplicateParamError(s.name)
            seen.add(s.name)

    @property
    def dimension(self) -> int:
        return len(self.specs)

    def names(self) -> list[str]:
        return [s.name for s in self.specs]

    def spec(self, name: str) -> ParamSpec:
        for s in self.specs:
            if s.name == name:
                return s
        raise KeyError(name)

    def default_point(self) -> TrialPoint:
        return TrialPoint({s.name: s.default for s in self.specs})

    def point_key(self, point: TrialPoint) -> tuple[Value, ...]:
        """Hashable identity of a point (values in spec order)."""
        return tuple(point[s.name] for s in self.specs)

    # -- validation ------------------------------------------------------

    def validate_point(self, point: TrialPoint) -> list[str]:
        """All invariant violations for point against this space; [] means ok."""
        violations = []
        declared = set(self.names())
        present = set(point.assignment.keys())
        for name in sorted(declared - present):
            violations.append(f"missing parameter {name!r}")
        for name in sorted(present - declared):
            violations.append(f"unknown parameter {name!r}")
        for s in self.specs:
            if s.name in present:
                msg = s.check_value(point[s.name])
                if msg:
                    violations.append(msg)
        return violations

    def require_valid(self, point: TrialPoint) -> None:
        violations = self.validate_point(point)
        if violations:
            raise InvalidPointError(violations)

    # -- unit-cube codec ----------------------------------------------------

    def encode_point(self, point: TrialPoint) -> np.ndarray:
        """Encode a valid point into the unit cube, coordinates in spec order."""
        self.require_valid(point)
        return np.array([s.encode_value(point[s.name]) for s in self.specs], dtype=float)

    def decode_vector(self, u: Iterable[float]) -> TrialPoint:
        """Decode any real vector of length d into a valid snapped point.

        Coordinates are clamped to [0, 1] first; numeric values snap onto
        the step lattice with half-away-from-zero rounding.
        """
        vec = np.asarray(list(u), dtype=float)
        if vec.shape != (self.dimension,):
            raise DimensionMismatchError(
                f"expected vector of length {self.dimension}, got shape {vec.shape}"
            )
        return TrialPoint(
            {s.name: s.decode_unit(float(vec[i])) for i, s in enumerate(self.specs)}
        )

    # -- exhaustive grid ------------------------------------------------------

    def grid_size(self) -> int:
        n = 1
        for s in self.specs:
            n *= s.lattice_count()
        return n

    def enumerate_grid(self, cap: int = DEFAULT_GRID_CAP) -> list[TrialPoint]:
        """All grid points, last spec varying fastest; errors before materializing."""
        size = self.grid_size()
        if size > cap:
            raise GridTooLargeError(f"grid has {size} points, cap is {cap}")
        names = self.names()
        out = []
        for combo in itertools.product(*(s.grid_values() for s in self.specs)):
            out.append(TrialPoint(dict(zip(names, combo))))
        return out

    # -- rendering -----------------------------------------------------------

    def render_config_args(self, point: TrialPoint) -> list[str]:
        """One -D<name>=<value> per parameter, in spec order."""
        self.require_valid(point)
        return [f"-D{s.name}={s.render(point[s.name])}" for s in self.specs]

    def render_value(self, name: str, v: Value) -> str:
        return self.spec(name).render(v)


# --- parameter file parsing ---------------------------------------------------

_KV_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)=(.*)$")

_NUMERIC_KEYS = {"min", "max", "step", "default", "unit"}
_CAT_KEYS = {"values", "default"}


def parse_param_file(text: str) -> ParamSpace:
    """Parse the line-oriented parameter file format into a ParamSpace.

    Blank lines and '#' comments are ignored. Each remaining line:

        <name> int min=<num> max=<num> step=<num> [default=<num>] [unit=<str>]
        <name> float min=<num> max=<num> step=<num> [default=<num>] [unit=<str>]
        <name> cat values=<v1>,<v2>,... [default=<v>]

    Raises:
        ParamSyntaxError: malformed line (with its 1-based line number).
        DuplicateParamError: two lines declare the same name.
        EmptySpaceError: no parameter lines remain.
        DomainError: bounds or defaults violate spec invariants.
    """
    specs: list[ParamSpec] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise ParamSyntaxError(line_no, f"expected '<name> <kind> ...', got {line!r}")
        name, kind = tokens[0], tokens[1]
        if kind not in (KIND_INT, KIND_FLOAT, KIND_CAT):
            raise ParamSyntaxError(line_no, f"unknown kind {kind!r}")
        kv: dict[str, str] = {}
        for tok in tokens[2:]:
            m = _KV_TOKEN.match(tok)
            if not m:
                raise ParamSyntaxError(line_no, f"expected key=value token, got {tok!r}")
            key, value = m.group(1), m.group(2)
            if key in kv:
                raise ParamSyntaxError(line_no, f"duplicate key {key!r}")
            kv[key] = value

        if name in seen:
            raise DuplicateParamError(name)
        seen.add(name)

        try:
            spec = _spec_from_tokens(name, kind, kv, line_no)
        except ValueError as exc:
            raise ParamSyntaxError(line_no, str(exc)) from exc
        except DomainError as exc:
            raise DomainError(f"line {line_no}: {exc}") from exc
        specs.append(spec)

    if not specs:
        raise EmptySpaceError("parameter file declares no parameters")
    return ParamSpace(tuple(specs))


def _spec_from_tokens(name: str, kind: str, kv: dict[str, str], line_no: int) -> ParamSpec:
    if kind == KIND_CAT:
        unknown = set(kv) - _CAT_KEYS
        if unknown:
            raise ParamSyntaxError(line_no, f"unexpected keys for cat: {sorted(unknown)}")
        if "values" not in kv:
            raise ParamSyntaxError(line_no, "cat parameter needs values=")
        values = tuple(v for v in kv["values"].split(",") if v != "")
        return ParamSpec(name=name, kind=kind, values=values, default=kv.get("default"))

    unknown = set(kv) - _NUMERIC_KEYS
    if unknown:
        raise ParamSyntaxError(line_no, f"unexpected keys for {kind}: {sorted(unknown)}")
    for req in ("min", "max", "step"):
        if req not in kv:
            raise ParamSyntaxError(line_no, f"{kind} parameter needs {req}=")
    if kind == KIND_INT:
        lower, upper, step = (_wholenum(kv[k]) for k in ("min", "max", "step"))
        default = _wholenum(kv["default"]) if "default" in kv else None
    else:
        lower, upper, step = (float(kv[k]) for k in ("min", "max", "step"))
        default = float(kv["default"]) if "default" in kv else None
    return ParamSpec(
        name=name, kind=kind, lower=lower, upper=upper, step=step,
        default=default, unit=kv.get("unit"),
    )
