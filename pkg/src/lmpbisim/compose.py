"""Synchronous parallel composition and the composed-distance bound."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from .equivalence import DistanceBounds, disjoint_union, distance
from .errors import ActionMismatch, SizeLimit, TheoremViolation
from .model import FiniteLmp, SubDist

DEFAULT_STATE_CAP = 10**6


def state_cap() -> int:
    return int(os.environ.get("LMP_STATE_CAP", DEFAULT_STATE_CAP))


def _same_actions(*models: FiniteLmp):
    first = set(models[0].actions)
    for m in models[1:]:
        if set(m.actions) != first:
            raise ActionMismatch(f"action sets differ: {sorted(first)} vs {sorted(m.actions)}")


def product_dist(mu1: SubDist, mu2: SubDist) -> SubDist:
    """Product measure, indexed like the states of :func:`compose`."""
    return SubDist(tuple(x * y for x in mu1.mass for y in mu2.mass))


def compose(m1: FiniteLmp, m2: FiniteLmp, cap: int | None = None) -> FiniteLmp:
    """Both components move together on every action; states are named ``"s|t"``."""
    _same_actions(m1, m2)
    cap = state_cap() if cap is None else cap
    n = m1.n * m2.n
    if n > cap:
        raise SizeLimit(f"product has {n} states, cap is {cap}")
    exact = m1.exact and m2.exact
    conv = (lambda x: x) if exact else float
    names = tuple(f"{s}|{t}" for s in m1.state_names for t in m2.state_names)
    trans = {}
    for a in m1.actions:
        t1, t2 = m1.trans[a], m2.trans[a]
        rows = []
        for r1 in t1:
            for r2 in t2:
                rows.append(tuple(conv(x) * conv(y) for x in r1 for y in r2))
        trans[a] = rows
    pi = product_dist(m1.initial, m2.initial)
    if not exact:
        pi = pi.as_float()
    return FiniteLmp(names, m1.actions, trans, pi, "rational" if exact else "float")


@dataclass(frozen=True)
class CompositionReport:
    eps1: DistanceBounds
    eps2: DistanceBounds
    composed: DistanceBounds
    bound: object
    holds: bool

    def to_json(self) -> dict:
        num = (lambda x: str(x) if isinstance(x, Fraction) else float(x))
        return {
            "eps1": self.eps1.to_json(),
            "eps2": self.eps2.to_json(),
            "composed": self.composed.to_json(),
            "bound": num(self.bound),
            "holds": self.holds,
        }


def model_distance(m1: FiniteLmp, m2: FiniteLmp, c, horizon: int) -> DistanceBounds:
    """Horizon-bounded distance between the initial distributions of two models."""
    union, p1, p2 = disjoint_union(m1, m2)
    return distance(union, p1, p2, c, max_horizon=horizon)


def check_composition_bound(m1, m1p, m2, m2p, c, horizon: int, strict: bool = True) -> CompositionReport:
    """Check ``d(m1||m2, m1'||m2') <= e1 + e2 - e1*e2`` on horizon-bounded intervals.

    The composed lower bound is compared against ``e1.upper + e2.upper -
    e1.lower * e2.lower``, which over-approximates the bound for every pair of
    true values inside the intervals, so a failure is a genuine violation.
    """
    _same_actions(m1, m1p, m2, m2p)
    e1 = model_distance(m1, m1p, c, horizon)
    e2 = model_distance(m2, m2p, c, horizon)
    composed = model_distance(compose(m1, m2), compose(m1p, m2p), c, horizon)
    bound = e1.upper + e2.upper - e1.lower * e2.lower
    holds = composed.lower <= bound
    report = CompositionReport(e1, e2, composed, bound, holds)
    if strict and not holds:
        raise TheoremViolation(f"composed distance {composed.lower} exceeds bound {bound}")
    return report
