"""Lifted transitions on subdistributions and trace masses over words.

These are deliberately plain loops over the model's own numbers: they serve
as the reference semantics that the faster code paths are checked against.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .model import FiniteLmp, Number, SubDist


def as_word(w) -> tuple:
    """Normalise a word: a sequence of labels, or a string of one-char labels."""
    if w is None:
        return ()
    if isinstance(w, str):
        return tuple(w)
    return tuple(w)


def lift_step(lmp: FiniteLmp, mu: SubDist, a: str) -> SubDist:
    """``mu'(t) = sum_s mu(s) * tau_a(s, {t})``."""
    lmp.check_dist(mu)
    mat = lmp.trans[lmp.check_action(a)]
    out = [lmp.zero()] * lmp.n
    for s, m in enumerate(mu.mass):
        if m == 0:
            continue
        row = mat[s]
        for t, p in enumerate(row):
            if p:
                out[t] += m * p
    return SubDist(tuple(out))


def run_word(lmp: FiniteLmp, mu: SubDist, w: Iterable) -> SubDist:
    word = as_word(w)
    for a in word:
        lmp.check_action(a)
    lmp.check_dist(mu)
    for a in word:
        mu = lift_step(lmp, mu, a)
    return mu


def trace_mass(lmp: FiniteLmp, mu: SubDist, w: Iterable) -> Number:
    return run_word(lmp, mu, w).total()


def words_up_to(actions: Sequence[str], horizon: int):
    """All words of length ``<= horizon``, shortest first, then lexicographic in ``actions`` order."""
    level = [()]
    yield ()
    for _ in range(horizon):
        level = [w + (a,) for w in level for a in actions]
        yield from level
