"""Small reference models used by the self-test, the docs and the test suite."""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

from .model import FiniteLmp, SubDist, from_dict

F = Fraction

FIG1_STATES = ("s0", "s1", "s2", "s3", "t0", "t1", "t2", "t3", "t4", "t5", "t6")
FIG1_EDGES = {
    ("s0", "s1"): F(1),
    ("s1", "s2"): F(1, 2),
    ("s1", "s3"): F(1, 2),
    ("s2", "s2"): F(1),
    ("t0", "t1"): F(1, 2),
    ("t0", "t2"): F(1, 2),
    ("t1", "t3"): F(1, 3),
    ("t1", "t4"): F(2, 3),
    ("t2", "t5"): F(1, 3),
    ("t2", "t6"): F(2, 3),
    ("t3", "t3"): F(1),
    ("t6", "t6"): F(1),
}


def from_edges(states, edges, action="a", initial=None) -> FiniteLmp:
    idx = {s: i for i, s in enumerate(states)}
    n = len(states)
    rows = [[F(0)] * n for _ in range(n)]
    for (s, t), p in edges.items():
        rows[idx[s]][idx[t]] = F(p)
    if initial is None:
        initial = states[0]
    pi = [F(0)] * n
    pi[idx[initial]] = F(1)
    return FiniteLmp(tuple(states), (action,), {action: rows}, SubDist(tuple(pi)))


def fig1() -> FiniteLmp:
    """Eleven states, one action ``a``; ``s0`` and ``t0`` are trace equivalent."""
    with resources.files("lmpbisim.data").joinpath("fig1.json").open(encoding="utf-8") as fh:
        import json

        return from_dict(json.load(fh))


def fig1_side(prefix: str) -> FiniteLmp:
    """The ``s`` half or the ``t`` half of the fig1 model, started at its root."""
    states = tuple(s for s in FIG1_STATES if s.startswith(prefix))
    edges = {k: v for k, v in FIG1_EDGES.items() if k[0].startswith(prefix)}
    return from_edges(states, edges, initial=prefix + "0")


def loop(p, name="s") -> FiniteLmp:
    """One state looping on ``a`` with probability ``p``."""
    return from_edges((name,), {(name, name): F(p)})


def half_loop() -> FiniteLmp:
    """``s`` loops with probability 1, ``t`` with probability 1/2."""
    return from_edges(("s", "t"), {("s", "s"): F(1), ("t", "t"): F(1, 2)})
