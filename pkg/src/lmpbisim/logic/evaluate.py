"""Model checking for the distribution, state and quantitative logics."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable

from ..equivalence import check_discount, dbisim_witness
from ..errors import UnknownAction, UnsupportedFragment
from ..model import FLOAT_SLACK, FiniteLmp, Number, SubDist
from ..semantics import lift_step, run_word
from .syntax import (
    And,
    Can,
    Conj,
    Delta,
    Diamond,
    DiamondC,
    DiamondSt,
    EpsAtLeast,
    Neg,
    Not,
    One,
    OPlus,
    Top,
    actions_of,
    chain,
    qchain,
)


def _at_least(mass: Number, q: Fraction) -> bool:
    if isinstance(mass, Fraction):
        return mass >= q
    return mass >= float(q) - FLOAT_SLACK


def _positive(mass: Number) -> bool:
    if isinstance(mass, Fraction):
        return mass > 0
    return mass > FLOAT_SLACK


def _check_actions(lmp: FiniteLmp, phi):
    missing = actions_of(phi) - set(lmp.actions)
    if missing:
        raise UnknownAction(f"formula uses actions not in the model: {sorted(missing)}")


class FormulaEvaluator:
    """Evaluates distribution formulas on one model, memoising lifted steps.

    Reuse one evaluator when checking many formulas against the same model.
    """

    def __init__(self, lmp: FiniteLmp):
        self.lmp = lmp
        self._succ: dict = {}

    def step(self, mu: SubDist, a: str) -> SubDist:
        key = (mu, a)
        nxt = self._succ.get(key)
        if nxt is None:
            nxt = lift_step(self.lmp, mu, a)
            self._succ[key] = nxt
        return nxt

    def holds(self, mu: SubDist, phi) -> bool:
        _check_actions(self.lmp, phi)
        self.lmp.check_dist(mu)
        return self._holds(mu, phi)

    def _holds(self, mu, phi) -> bool:
        if isinstance(phi, Top):
            return True
        if isinstance(phi, And):
            return all(self._holds(mu, p) for p in phi.parts)
        if isinstance(phi, Diamond):
            nxt = self.step(mu, phi.action)
            return _at_least(nxt.total(), phi.q) and self._holds(nxt, phi.sub)
        if isinstance(phi, EpsAtLeast):
            return _at_least(mu.total(), phi.q)
        if isinstance(phi, Can):
            return _positive(self.step(mu, phi.action).total())
        if isinstance(phi, Delta):
            return not _positive(self.step(mu, phi.action).total())
        if isinstance(phi, Not):
            return not self._holds(mu, phi.sub)
        raise TypeError(f"not a distribution formula: {phi!r}")


def eval_formula(lmp: FiniteLmp, mu: SubDist, phi) -> bool:
    return FormulaEvaluator(lmp).holds(mu, phi)


def sat_set(lmp: FiniteLmp, phi, _memo=None) -> frozenset:
    """Indices of the states satisfying a state formula."""
    memo = {} if _memo is None else _memo
    if phi in memo:
        return memo[phi]
    if isinstance(phi, Top):
        out = frozenset(range(lmp.n))
    elif isinstance(phi, And):
        out = frozenset(range(lmp.n))
        for p in phi.parts:
            out &= sat_set(lmp, p, memo)
    elif isinstance(phi, DiamondSt):
        target = sat_set(lmp, phi.sub, memo)
        mat = lmp.trans[lmp.check_action(phi.action)]
        out = frozenset(
            s for s in range(lmp.n)
            if _at_least(sum((mat[s][t] for t in target), lmp.zero()), phi.q)
        )
    else:
        raise TypeError(f"not a state formula: {phi!r}")
    memo[phi] = out
    return out


def eval_state_formula(lmp: FiniteLmp, s, phi) -> bool:
    _check_actions(lmp, phi)
    return lmp.index(s) in sat_set(lmp, phi)


def embed_state_formula(phi):
    """Replace every state diamond by the distribution diamond with the same label and threshold."""
    if isinstance(phi, Top):
        return Top()
    if isinstance(phi, And):
        return And(tuple(embed_state_formula(p) for p in phi.parts))
    if isinstance(phi, DiamondSt):
        return Diamond(phi.action, phi.q, embed_state_formula(phi.sub))
    raise TypeError(f"not a state formula: {phi!r}")


def _conjuncts(phi) -> list:
    if isinstance(phi, Top):
        return [Top()]
    if isinstance(phi, And):
        out = []
        for p in phi.parts:
            out.extend(_conjuncts(p))
        return out
    if isinstance(phi, EpsAtLeast):
        return [phi]
    if isinstance(phi, Diamond):
        return [Diamond(phi.action, phi.q, c) for c in _conjuncts(phi.sub)]
    raise UnsupportedFragment(f"{type(phi).__name__} is outside the negation-free fragment")


def to_cnf(phi):
    """Distribute diamonds over conjunctions: a conjunction of diamond chains."""
    parts = _conjuncts(phi)
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def find_distinguishing_formula(lmp: FiniteLmp, mu: SubDist, nu: SubDist):
    """A formula true for exactly one of ``mu``/``nu``, or None when they are bisimilar.

    Built from a shortest separating word ``w``: zero thresholds along the
    prefix, and the midpoint of the two final masses on the last step.
    """
    w = dbisim_witness(lmp, mu, nu)
    if w is None:
        return None
    m1 = run_word(lmp, mu, w).total()
    m2 = run_word(lmp, nu, w).total()
    q = (m1 + m2) / 2
    if not w:
        return EpsAtLeast(q)
    return chain(w, [Fraction(0)] * (len(w) - 1) + [q])


class QEvaluator:
    """Real-valued semantics of quantitative formulas, sharing lifted steps across calls."""

    def __init__(self, lmp: FiniteLmp, c):
        self.lmp = lmp
        self.exact = lmp.exact
        self.c = check_discount(c, self.exact)
        self._succ: dict = {}

    def value(self, mu: SubDist, phi) -> Number:
        _check_actions(self.lmp, phi)
        self.lmp.check_dist(mu)
        exact = self.exact and mu.exact
        one = Fraction(1) if exact else 1.0
        conv = (lambda x: x) if exact else float
        c = self.c if exact else float(self.c)
        return self._value(mu, phi, one, conv, c)

    def _step(self, m, a):
        key = (m, a)
        nxt = self._succ.get(key)
        if nxt is None:
            nxt = self._succ[key] = lift_step(self.lmp, m, a)
        return nxt

    def _value(self, m, f, one, conv, c):
        if isinstance(f, One):
            return m.total()
        if isinstance(f, OPlus):
            return min(self._value(m, f.sub, one, conv, c) + conv(f.p), one)
        if isinstance(f, Neg):
            return one - self._value(m, f.sub, one, conv, c)
        if isinstance(f, Conj):
            return min((self._value(m, p, one, conv, c) for p in f.parts), default=one)
        if isinstance(f, DiamondC):
            return c * self._value(self._step(m, f.action), f.sub, one, conv, c)
        raise TypeError(f"not a quantitative formula: {f!r}")


def eval_qformula(lmp: FiniteLmp, mu: SubDist, phi, c) -> Number:
    check_discount(c, lmp.exact and mu.exact)
    return QEvaluator(lmp, c).value(mu, phi)


def logical_distance_lower(lmp: FiniteLmp, mu: SubDist, nu: SubDist, c, formulas: Iterable) -> Number:
    """``max |phi(mu) - phi(nu)|`` over the given quantitative formulas (0 if none)."""
    exact = lmp.exact and mu.exact and nu.exact
    check_discount(c, exact)
    ev = QEvaluator(lmp, c)
    best = Fraction(0) if exact else 0.0
    for phi in formulas:
        best = max(best, abs(ev.value(mu, phi) - ev.value(nu, phi)))
    return best


def chain_qformulas(actions, horizon: int) -> list:
    """``<w>c 1`` for every word of length ``<= horizon``."""
    from ..semantics import words_up_to

    return [qchain(w) for w in words_up_to(tuple(actions), horizon)]
