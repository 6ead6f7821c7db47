"""Finite models built from continuous-state kernels.

``make_ex1`` and ``make_cantor`` are exact: every trace mass of the finite
model equals the corresponding mass of the continuous process. ``make_heater``
is a numerical quadrature of a Gaussian difference equation.

The [0, 1] example only ever asks two questions of a distribution on (0, 1):
its total mass and its first moment (points ``s`` jump to each endpoint atom
with probability ``s/2``). Mass on (0, 1) is therefore pushed onto the nodes
of a uniform grid with piecewise-linear (hat) weights, which preserves both
quantities exactly for any polynomial density.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .compose import state_cap
from .errors import InvalidDepth, InvalidGrid, InvariantError, StateCapExceeded
from .model import FiniteLmp, SubDist

F = Fraction

# density of tau_a(1, .) on (0, 1) as polynomial coefficients: 1/4 + x/2
EX1_ONE_DENSITY = (F(1, 4), F(1, 2))
EX1_ZERO_DENSITY = (F(1, 2),)


def _poly_integral(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    return sum((c * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1) for k, c in enumerate(coeffs)), F(0))


def _poly_mul(p, q):
    out = [F(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def hat_weights(density: Sequence[Fraction], cells: int) -> list[Fraction]:
    """``int density(x) * hat_j(x) dx`` over (0, 1) for the nodes ``j/cells``."""
    h = F(1, cells)
    w = [F(0)] * (cells + 1)
    for k in range(cells):
        lo, hi = k * h, (k + 1) * h
        # on [lo, hi]: hat_k = (hi - x)/h, hat_{k+1} = (x - lo)/h
        w[k] += _poly_integral(_poly_mul(density, [hi / h, -1 / h]), lo, hi)
        w[k + 1] += _poly_integral(_poly_mul(density, [-lo / h, 1 / h]), lo, hi)
    return w


def make_ex1(grid_cells: int, initial="0", one_density: Sequence = EX1_ONE_DENSITY) -> FiniteLmp:
    """The [0, 1] example with mass on (0, 1) carried by ``grid_cells + 1`` nodes.

    States: atoms ``"0"`` and ``"1"``, then nodes ``"g0" .. "gN"`` standing for
    the points ``j/N`` approached from inside (0, 1). ``one_density`` replaces
    the density of the step from atom 1 (polynomial coefficients).
    """
    if not isinstance(grid_cells, int) or grid_cells < 2:
        raise InvalidGrid(f"need at least 2 grid cells, got {grid_cells!r}")
    N = grid_cells
    names = ("0", "1") + tuple(f"g{j}" for j in range(N + 1))
    n = len(names)
    rows = [[F(0)] * n for _ in range(n)]
    for atom, dens in ((0, EX1_ZERO_DENSITY), (1, tuple(F(c) for c in one_density))):
        for j, w in enumerate(hat_weights(dens, N)):
            if w < 0:
                raise InvariantError("density must be nonnegative on (0, 1)")
            rows[atom][2 + j] = w
    for j in range(N + 1):
        s = F(j, N)
        rows[2 + j][0] = s / 2
        rows[2 + j][1] = s / 2
    lmp = FiniteLmp(names, ("a",), {"a": rows}, SubDist((F(1),) + (F(0),) * (n - 1)))
    if initial is None:
        return lmp
    if isinstance(initial, SubDist):
        return lmp.with_initial(initial)
    pi = [F(0)] * n
    pi[lmp.index(initial)] = F(1)
    return lmp.with_initial(SubDist(tuple(pi)))


def _ternary(idx: int, depth: int) -> str:
    digits = []
    for _ in range(depth):
        idx, r = divmod(idx, 3)
        digits.append(str(r))
    return "".join(reversed(digits))


def _in_E(digits: str, i: int) -> bool:
    # E_i keeps the triadic intervals whose first i+1 digits avoid 1
    return "1" not in digits[: i + 1]


def make_cantor(depth: int, max_action: int, initial=None) -> FiniteLmp:
    """Cantor-set example on the ``3**depth`` triadic cells of [0, 1], actions ``a0 .. ak``.

    Action ``a_i`` sends any point of ``E_i`` to half the uniform distribution
    on ``E_i`` and leaves every other point where it is. Membership in ``E_i``
    is constant on cells of depth ``i + 1``, so the discretisation is exact
    for ``i < depth``. The extra state ``"x0"`` is the point 0.
    """
    if not (1 <= max_action < depth <= 12):
        raise InvalidDepth(f"need 1 <= max_action < depth <= 12, got depth={depth}, max_action={max_action}")
    ncell = 3**depth
    cells = [_ternary(i, depth) for i in range(ncell)]
    names = ("x0",) + tuple("t" + c for c in cells)
    n = len(names)
    actions = tuple(f"a{i}" for i in range(max_action + 1))
    trans = {}
    for i in range(max_action + 1):
        inside = [_in_E(c, i) for c in cells]
        count = sum(inside)
        w = F(1, 2) / count
        spread = tuple([F(0)] + [w if flag else F(0) for flag in inside])
        rows = [spread]
        for k, flag in enumerate(inside):
            if flag:
                rows.append(spread)
            else:
                row = [F(0)] * n
                row[1 + k] = F(1)
                rows.append(tuple(row))
        trans[f"a{i}"] = rows
    pi = SubDist((F(1),) + (F(0),) * ncell)
    lmp = FiniteLmp(names, actions, trans, pi)
    if initial is not None:
        lmp = lmp.with_initial(initial)
    return lmp


def _cantor_depth(lmp: FiniteLmp) -> int:
    return len(lmp.state_names[1]) - 1


def _uniform_on(lmp: FiniteLmp, keep) -> SubDist:
    idx = [k for k, s in enumerate(lmp.state_names) if s.startswith("t") and keep(s[1:])]
    mass = [F(0)] * lmp.n
    for k in idx:
        mass[k] = F(1, len(idx))
    return SubDist(tuple(mass))


def cantor_interval(lmp: FiniteLmp, n: int) -> SubDist:
    """Uniform distribution on ``[0, 3**-(n+1)]``."""
    d = _cantor_depth(lmp)
    if not 0 <= n < d:
        raise InvalidDepth(f"need 0 <= n < depth={d}")
    return _uniform_on(lmp, lambda digits: digits[: n + 1] == "0" * (n + 1))


def cantor_set_approx(lmp: FiniteLmp, n: int) -> SubDist:
    """Uniform distribution on ``E_n``."""
    d = _cantor_depth(lmp)
    if not 0 <= n < d:
        raise InvalidDepth(f"need 0 <= n < depth={d}")
    return _uniform_on(lmp, lambda digits: _in_E(digits, n))


@dataclass
class HeaterParams:
    """Rooms, transfer rates and the temperature grid of the heater example.

    ``a[i][j]`` is the transfer rate from room ``j`` into room ``i``.
    """

    n_rooms: int = 1
    x0: float = 10.0
    b: Sequence[float] = (0.1,)
    a: Sequence[Sequence[float]] = ((0.0,),)
    c_heat: Sequence[float] = (2.0,)
    noise_sd: Sequence[float] = (0.5,)
    temp_grid: tuple = (10.0, 30.0, 20)
    seed: int = 0
    initial_temps: Sequence[float] | None = None

    def __post_init__(self):
        k = self.n_rooms
        if k < 1:
            raise InvariantError("n_rooms must be positive")
        for name in ("b", "c_heat", "noise_sd"):
            vals = getattr(self, name)
            if len(vals) != k:
                raise InvariantError(f"{name} needs {k} entries")
        if len(self.a) != k or any(len(r) != k for r in self.a):
            raise InvariantError(f"a must be {k}x{k}")
        if any(self.a[i][i] != 0 for i in range(k)):
            raise InvariantError("a must have a zero diagonal")
        if min(self.b) < 0 or min(min(r) for r in self.a) < 0 or min(self.c_heat) < 0:
            raise InvariantError("rates must be nonnegative")
        if min(self.noise_sd) < 0:
            raise InvariantError("noise_sd must be nonnegative")
        lo, hi, cells = self.temp_grid
        if int(cells) < 2 or not hi > lo:
            raise InvariantError("temperature grid needs hi > lo and at least 2 cells")
        self.temp_grid = (float(lo), float(hi), int(cells))

    @property
    def edges(self) -> np.ndarray:
        lo, hi, cells = self.temp_grid
        return np.linspace(lo, hi, cells + 1)

    @property
    def midpoints(self) -> np.ndarray:
        e = self.edges
        return (e[:-1] + e[1:]) / 2


def heater_actions(n_rooms: int) -> list[tuple]:
    rooms = range(n_rooms)
    if n_rooms <= 3:
        subsets = [tuple(r for r in rooms if mask >> r & 1) for mask in range(2**n_rooms)]
        return sorted(subsets, key=lambda s: (len(s), s))
    return [()] + [(r,) for r in rooms]


def action_label(on: tuple) -> str:
    return "off" if not on else "on_" + "_".join(str(r + 1) for r in on)


def _cell_of(x: float, edges: np.ndarray) -> int | None:
    if x < edges[0] or x > edges[-1]:
        return None
    return min(int(np.searchsorted(edges, x, side="right")) - 1, len(edges) - 2)


def room_mean(p: HeaterParams, temps: Sequence[float], on: tuple) -> np.ndarray:
    """Expected next temperatures from ``temps`` with the rooms in ``on`` heated."""
    x = np.asarray(temps, dtype=float)
    out = x + np.asarray(p.b) * (p.x0 - x)
    a = np.asarray(p.a, dtype=float)
    out += (a * (x[None, :] - x[:, None])).sum(axis=1)
    heat = np.zeros(p.n_rooms)
    heat[list(on)] = 1.0
    return out + np.asarray(p.c_heat) * heat


def _room_cell_mass(mean: float, sd: float, edges: np.ndarray) -> np.ndarray:
    if sd == 0:
        out = np.zeros(len(edges) - 1)
        k = _cell_of(mean, edges)
        if k is not None:
            out[k] = 1.0
        return out
    return np.diff(ndtr((edges - mean) / sd))


def make_heater(p: HeaterParams, cap: int | None = None) -> FiniteLmp:
    """Discretised heater model (float mode); states are ``"<modes>:<cells>"``.

    Mass leaving the temperature grid is dropped, so rows may sum below one.
    """
    k = p.n_rooms
    lo, hi, cells = p.temp_grid
    edges, mids = p.edges, p.midpoints
    acts = heater_actions(k)
    modes = [tuple(1 if r in on else 0 for r in range(k)) for on in acts]
    grid = list(product(range(cells), repeat=k))
    n = len(modes) * len(grid)
    cap = state_cap() if cap is None else cap
    if n > cap:
        raise StateCapExceeded(f"heater model needs {n} states, cap is {cap}")
    names = tuple(f"{''.join(map(str, m))}:{'.'.join(map(str, g))}" for m in modes for g in grid)
    trans = {}
    per_mode = len(grid)
    for ai, on in enumerate(acts):
        mat = np.zeros((n, n))
        target = ai * per_mode
        for gi, g in enumerate(grid):
            mean = room_mean(p, [mids[c] for c in g], on)
            masses = [_room_cell_mass(mean[r], p.noise_sd[r], edges) for r in range(k)]
            joint = masses[0]
            for m in masses[1:]:
                joint = np.multiply.outer(joint, m)
            row = joint.ravel()
            for mi in range(len(modes)):
                mat[mi * per_mode + gi, target:target + per_mode] = row
        trans[action_label(on)] = [tuple(float(x) for x in r) for r in mat]
    start = p.initial_temps if p.initial_temps is not None else [p.x0] * k
    cell = tuple(min(max(_cell_of(min(max(t, lo), hi), edges), 0), cells - 1) for t in start)
    pi = [0.0] * n
    pi[grid.index(cell)] = 1.0
    return FiniteLmp(names, tuple(action_label(on) for on in acts), trans, SubDist(tuple(pi)), "float")


def simulate_heater(p: HeaterParams, temps: Sequence[float], on: tuple, samples: int,
                    rng: np.random.Generator | None = None) -> np.ndarray:
    """Monte Carlo draws of the next temperatures (``samples x n_rooms``)."""
    rng = np.random.default_rng(p.seed) if rng is None else rng
    mean = room_mean(p, temps, on)
    return mean + rng.standard_normal((samples, p.n_rooms)) * np.asarray(p.noise_sd)
