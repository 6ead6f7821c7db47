"""Finite labelled Markov processes and subdistributions over their states.

Two numeric carriers are supported and never mixed inside one model:

* ``"rational"``: every probability is a :class:`fractions.Fraction`;
* ``"float"``: every probability is a Python ``float``.

Exact rationals are required by the decision procedures in
:mod:`lmpbisim.equivalence`; floats are accepted by the metric code and the
discretised continuous kernels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    InvariantError,
    MassExceeded,
    ParseError,
    UnknownAction,
    UnknownState,
)

Number = Union[Fraction, float]

FLOAT_SLACK = 1e-9
INT64_SAFE = 2**62

RATIONAL = "rational"
FLOAT = "float"


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, an integer string or a decimal string exactly."""
    if isinstance(value, bool):
        raise ParseError(f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed rational {value!r}") from None
    raise ParseError(f"expected a rational string like '1/2', got {value!r}")


def to_exact(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(x)
    return parse_rational(x)


def format_number(x: Number) -> Union[str, float]:
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def _coerce(x, exact: bool) -> Number:
    if type(x) is Fraction:
        if exact:
            return x
        return float(x)
    if exact:
        if isinstance(x, float):
            raise InvariantError(f"float value {x!r} in an exact (rational) context")
        return parse_rational(x)
    return float(x)


def exact_sum(values) -> Fraction:
    """Sum of fractions via one common denominator (much faster than repeated ``+``)."""
    nz = [x for x in values if x]
    den = reduce(math.lcm, {x.denominator for x in nz}, 1)
    return Fraction(sum(x.numerator * (den // x.denominator) for x in nz), den)


def _fits_int64(arr_bound: int) -> bool:
    return arr_bound < INT64_SAFE


def int_array(rows: Sequence[Sequence[int]]) -> np.ndarray:
    """Integer array, int64 when every entry is small enough, object otherwise."""
    bound = max((abs(v) for row in rows for v in row), default=0)
    if _fits_int64(bound):
        return np.array(rows, dtype=np.int64).reshape(len(rows), -1)
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        out[i, :] = list(row)
    return out


@dataclass(frozen=True, eq=False)
class SubDist:
    """A subdistribution: nonnegative masses indexed by state, total at most one."""

    mass: tuple

    def __post_init__(self):
        exact = all(not isinstance(m, float) for m in self.mass)
        values = tuple(_coerce(m, exact) for m in self.mass)
        object.__setattr__(self, "mass", values)
        for i, m in enumerate(values):
            if m < 0:
                raise InvariantError(f"negative mass {m} at index {i}")
        total = exact_sum(values) if exact else sum(values, 0.0)
        if total > 1 + (0 if exact else FLOAT_SLACK):
            raise MassExceeded(f"total mass {total} exceeds 1")

    @property
    def exact(self) -> bool:
        return all(isinstance(m, Fraction) for m in self.mass)

    def __len__(self):
        return len(self.mass)

    def __getitem__(self, i):
        return self.mass[i]

    def __iter__(self):
        return iter(self.mass)

    def __eq__(self, other):
        if not isinstance(other, SubDist):
            return NotImplemented
        return self.mass == other.mass

    def __hash__(self):
        return hash(self.mass)

    def total(self) -> Number:
        return exact_sum(self.mass) if self.exact else sum(self.mass, 0.0)

    def as_float(self) -> "SubDist":
        return SubDist(tuple(float(m) for m in self.mass))

    def support(self) -> list[int]:
        return [i for i, m in enumerate(self.mass) if m != 0]

    def __repr__(self):
        body = ", ".join(format_number(m).__str__() for m in self.mass)
        return f"SubDist([{body}])"


@dataclass(frozen=True, eq=False)
class FiniteLmp:
    """Finite-state LMP: per-action subprobability matrices plus an initial distribution.

    ``trans[a][s][t]`` is the probability of moving from state ``s`` to ``t``
    under action ``a``. Rows summing to less than one model halting.
    """

    state_names: tuple
    actions: tuple
    trans: Mapping[str, tuple]
    initial: SubDist
    numeric: str = RATIONAL
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.numeric not in (RATIONAL, FLOAT):
            raise InvariantError(f"unknown numeric mode {self.numeric!r}")
        exact = self.numeric == RATIONAL
        names = tuple(str(s) for s in self.state_names)
        if not names:
            raise InvariantError("a model needs at least one state")
        if len(set(names)) != len(names):
            raise InvariantError("duplicate state names")
        actions = tuple(str(a) for a in self.actions)
        if not actions:
            raise InvariantError("action list is empty")
        if len(set(actions)) != len(actions):
            raise InvariantError("duplicate action labels")
        if set(self.trans) != set(actions):
            missing = set(actions) - set(self.trans)
            extra = set(self.trans) - set(actions)
            raise InvariantError(
                f"transitions do not match actions (missing {sorted(missing)}, extra {sorted(extra)})"
            )
        n = len(names)
        limit = 1 if exact else 1 + FLOAT_SLACK
        trans = {}
        for a in actions:
            rows = self.trans[a]
            if len(rows) != n:
                raise InvariantError(f"action {a!r}: expected {n} rows, got {len(rows)}")
            mat = []
            for i, row in enumerate(rows):
                if len(row) != n:
                    raise InvariantError(
                        f"action {a!r}, row {i} ({names[i]}): expected {n} entries, got {len(row)}"
                    )
                vals = tuple(_coerce(x, exact) for x in row)
                if exact:
                    bad = [j for j, x in enumerate(vals) if x.numerator < 0 or x.numerator > x.denominator]
                else:
                    bad = [j for j, x in enumerate(vals) if not 0 <= x <= 1]
                if bad:
                    raise InvariantError(
                        f"action {a!r}, row {i} ({names[i]}), entry {bad[0]}: "
                        f"value {vals[bad[0]]} outside [0,1]"
                    )
                total = exact_sum(vals) if exact else sum(vals, 0.0)
                if total > limit:
                    raise InvariantError(
                        f"action {a!r}, row {i} ({names[i]}): row sum {total} exceeds 1"
                    )
                mat.append(vals)
            trans[a] = tuple(mat)
        initial = self.initial
        if not isinstance(initial, SubDist):
            initial = SubDist(tuple(_coerce(x, exact) for x in initial))
        if len(initial) != n:
            raise InvariantError(f"initial distribution has {len(initial)} entries, expected {n}")
        if exact and not initial.exact:
            raise InvariantError("float initial distribution in a rational model")
        if not exact:
            initial = initial.as_float()
        total = initial.total()
        if (exact and total != 1) or (not exact and abs(total - 1) > FLOAT_SLACK):
            raise InvariantError(f"initial distribution has mass {total}, expected 1")
        object.__setattr__(self, "state_names", names)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "trans", MappingProxyType(trans))
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(names)})

    @property
    def n(self) -> int:
        return len(self.state_names)

    @property
    def exact(self) -> bool:
        return self.numeric == RATIONAL

    def index(self, state) -> int:
        if isinstance(state, int) and not isinstance(state, bool):
            if 0 <= state < self.n:
                return state
            raise UnknownState(f"state index {state} out of range")
        try:
            return self._index[state]
        except KeyError:
            raise UnknownState(f"unknown state {state!r}") from None

    def check_action(self, a: str) -> str:
        if a not in self.trans:
            raise UnknownAction(f"unknown action {a!r}")
        return a

    def check_dist(self, mu: SubDist) -> SubDist:
        if len(mu) != self.n:
            raise DimensionMismatch(f"subdistribution has {len(mu)} entries, model has {self.n} states")
        return mu

    def zero(self) -> Number:
        return Fraction(0) if self.exact else 0.0

    def one(self) -> Number:
        return Fraction(1) if self.exact else 1.0

    def with_initial(self, initial: SubDist) -> "FiniteLmp":
        return FiniteLmp(self.state_names, self.actions, self.trans, initial, self.numeric)

    def row_sum(self, a: str, s) -> Number:
        return sum(self.trans[self.check_action(a)][self.index(s)], self.zero())

    @cached_property
    def float_matrices(self) -> dict:
        return {a: np.array([[float(x) for x in row] for row in self.trans[a]], dtype=float)
                for a in self.actions}

    @cached_property
    def integer_form(self) -> tuple:
        """``(D, {a: A_a})`` with ``A_a = D * trans[a]`` integral; exact mode only."""
        if not self.exact:
            raise InvariantError("integer form requires a rational model")
        denom = 1
        for a in self.actions:
            for row in self.trans[a]:
                for x in row:
                    denom = math.lcm(denom, x.denominator)
        mats = {}
        for a in self.actions:
            mats[a] = int_array([[x.numerator * (denom // x.denominator) for x in row]
                                 for row in self.trans[a]])
        return denom, mats

    def to_dict(self) -> dict:
        return {
            "numeric": self.numeric,
            "states": list(self.state_names),
            "actions": list(self.actions),
            "transitions": {
                a: [[format_number(x) for x in row] for row in self.trans[a]] for a in self.actions
            },
            "initial": [format_number(x) for x in self.initial],
        }

    def __repr__(self):
        return f"FiniteLmp(n={self.n}, actions={list(self.actions)}, numeric={self.numeric!r})"


def from_dict(data: dict) -> FiniteLmp:
    if not isinstance(data, dict):
        raise ParseError("model file must contain a JSON object")
    for key in ("numeric", "states", "actions", "transitions", "initial"):
        if key not in data:
            raise ParseError(f"missing key {key!r}")
    numeric = data["numeric"]
    if numeric not in (RATIONAL, FLOAT):
        raise ParseError(f"'numeric' must be 'rational' or 'float', got {numeric!r}")
    if not isinstance(data["states"], list) or not isinstance(data["actions"], list):
        raise ParseError("'states' and 'actions' must be lists")
    if not isinstance(data["transitions"], dict):
        raise ParseError("'transitions' must be an object keyed by action")

    def entry(x, where):
        if numeric == RATIONAL:
            if isinstance(x, float):
                raise ParseError(f"{where}: rational models store entries as strings 'p/q', got {x!r}")
            try:
                return parse_rational(x)
            except ParseError as exc:
                raise ParseError(f"{where}: {exc}") from None
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ParseError(f"{where}: float models store entries as numbers, got {x!r}")
        return float(x)

    trans = {}
    for a, rows in data["transitions"].items():
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise ParseError(f"transitions[{a!r}] must be a list of rows")
        trans[a] = [[entry(x, f"transitions[{a!r}][{i}][{j}]") for j, x in enumerate(row)]
                    for i, row in enumerate(rows)]
    if not isinstance(data["initial"], list):
        raise ParseError("'initial' must be a list")
    initial = [entry(x, f"initial[{i}]") for i, x in enumerate(data["initial"])]
    try:
        init = SubDist(tuple(initial))
    except MassExceeded as exc:
        raise InvariantError(f"initial: {exc}") from None
    return FiniteLmp(tuple(data["states"]), tuple(data["actions"]), trans, init, numeric)


def load_model(path) -> FiniteLmp:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    return from_dict(data)


def dumps_model(lmp: FiniteLmp) -> str:
    return json.dumps(lmp.to_dict(), indent=1)


def save_model(lmp: FiniteLmp, path) -> None:
    Path(path).write_text(dumps_model(lmp) + "\n", encoding="utf-8")


def dirac(lmp: FiniteLmp, state) -> SubDist:
    i = lmp.index(state)
    mass = [lmp.zero()] * lmp.n
    mass[i] = lmp.one()
    return SubDist(tuple(mass))


def zero_dist(lmp_or_size) -> SubDist:
    if isinstance(lmp_or_size, FiniteLmp):
        return SubDist((lmp_or_size.zero(),) * lmp_or_size.n)
    return SubDist((Fraction(0),) * int(lmp_or_size))


def uniform(lmp: FiniteLmp, states: Iterable) -> SubDist:
    idx = sorted({lmp.index(s) for s in states})
    if not idx:
        raise InvariantError("uniform distribution over an empty set")
    w = Fraction(1, len(idx)) if lmp.exact else 1.0 / len(idx)
    mass = [lmp.zero()] * lmp.n
    for i in idx:
        mass[i] = w
    return SubDist(tuple(mass))


def mix(coeffs: Sequence[tuple], size: int | None = None) -> SubDist:
    """Entrywise weighted sum ``sum(a_i * mu_i)``; must stay a subdistribution.

    ``size`` is only needed when ``coeffs`` is empty.
    """
    if not coeffs:
        if size is None:
            raise DimensionMismatch("mix of an empty list needs an explicit size")
        return zero_dist(size)
    n = len(coeffs[0][1])
    exact = True
    for w, mu in coeffs:
        if len(mu) != n:
            raise DimensionMismatch("mixing subdistributions of different sizes")
        if isinstance(w, float) or not mu.exact:
            exact = False
    if exact:
        weights = [to_exact(w) for w, _ in coeffs]
        zero = Fraction(0)
    else:
        weights = [float(w) for w, _ in coeffs]
        zero = 0.0
    if any(w < 0 for w in weights):
        raise InvariantError("mixing coefficients must be nonnegative")
    out = [zero] * n
    for w, (_, mu) in zip(weights, coeffs):
        for i, m in enumerate(mu.mass):
            out[i] += w * m
    total = sum(out, zero)
    if total > 1 + (0 if exact else FLOAT_SLACK):
        raise MassExceeded(f"mixture has total mass {total} > 1")
    return SubDist(tuple(out))


def common_denominator(values: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (v.denominator for v in values), 1)
