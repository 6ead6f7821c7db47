"""Formula ASTs.

Three families share this module:

* distribution formulas (``Top``, ``And``, ``Diamond``, ``EpsAtLeast`` and the
  ``Can``/``Delta``/``Not`` extensions), evaluated on subdistributions;
* state formulas (``Top``, ``And``, ``DiamondSt``), evaluated on states;
* quantitative formulas (``One``, ``OPlus``, ``Neg``, ``Conj``,
  ``DiamondC``), valued in [0, 1].

``str()`` of any node prints it in the concrete syntax accepted by
:mod:`lmpbisim.logic.parser`, so printing and parsing round-trip.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import ScopeError


def _q(q: Fraction) -> str:
    return str(q)


def _wrap(phi) -> str:
    return f"({phi})" if isinstance(phi, (And, Conj)) or (isinstance(phi, OPlus)) else str(phi)


@dataclass(frozen=True)
class Top:
    def __str__(self):
        return "T"


@dataclass(frozen=True)
class And:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __str__(self):
        return " & ".join(f"({p})" if isinstance(p, And) else str(p) for p in self.parts)


@dataclass(frozen=True)
class Diamond:
    action: str
    q: Fraction
    sub: object

    def __post_init__(self):
        object.__setattr__(self, "q", _threshold(self.q))
        if contains_eps(self.sub):
            raise ScopeError(f"eps>=q inside the scope of <{self.action}>")

    def __str__(self):
        return f"<{self.action}>{_q(self.q)} {_wrap(self.sub)}"


@dataclass(frozen=True)
class EpsAtLeast:
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "q", _threshold(self.q))

    def __str__(self):
        return f"eps>={_q(self.q)}"


@dataclass(frozen=True)
class Can:
    action: str

    def __str__(self):
        return f"can({self.action})"


@dataclass(frozen=True)
class Delta:
    action: str

    def __str__(self):
        return f"delta({self.action})"


@dataclass(frozen=True)
class Not:
    sub: object

    def __str__(self):
        return f"!{_wrap(self.sub)}"


@dataclass(frozen=True)
class DiamondSt:
    action: str
    q: Fraction
    sub: object

    def __post_init__(self):
        object.__setattr__(self, "q", _threshold(self.q))

    def __str__(self):
        return f"<{self.action}>st {_q(self.q)} {_wrap(self.sub)}"


@dataclass(frozen=True)
class One:
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class OPlus:
    sub: object
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", _threshold(self.p))

    def __str__(self):
        inner = f"({self.sub})" if isinstance(self.sub, (Neg, DiamondC)) else str(self.sub)
        return f"{inner} (+) {_q(self.p)}"


@dataclass(frozen=True)
class Neg:
    sub: object

    def __str__(self):
        return f"~{_wrap(self.sub)}"


@dataclass(frozen=True)
class Conj:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __str__(self):
        return "min(" + ", ".join(str(p) for p in self.parts) + ")"


@dataclass(frozen=True)
class DiamondC:
    action: str
    sub: object

    def __str__(self):
        return f"<{self.action}>c {_wrap(self.sub)}"


def _threshold(q) -> Fraction:
    if isinstance(q, float):
        q = Fraction(repr(q))
    q = Fraction(q)
    if not 0 <= q <= 1:
        raise ValueError(f"threshold {q} outside [0, 1]")
    return q


def contains_eps(phi) -> bool:
    if isinstance(phi, EpsAtLeast):
        return True
    if isinstance(phi, And):
        return any(contains_eps(p) for p in phi.parts)
    if isinstance(phi, (Diamond, Not)):
        return contains_eps(phi.sub)
    return False


def depth(phi) -> int:
    """Modal depth: nesting of diamond operators."""
    if isinstance(phi, (And, Conj)):
        return max((depth(p) for p in phi.parts), default=0)
    if isinstance(phi, (Diamond, DiamondSt, DiamondC)):
        return 1 + depth(phi.sub)
    if isinstance(phi, (Not, Neg, OPlus)):
        return depth(phi.sub)
    return 0


def actions_of(phi) -> set:
    out = set()
    stack = [phi]
    while stack:
        f = stack.pop()
        if isinstance(f, (Diamond, DiamondSt, DiamondC, Can, Delta)):
            out.add(f.action)
        if isinstance(f, (And, Conj)):
            stack.extend(f.parts)
        elif hasattr(f, "sub"):
            stack.append(f.sub)
    return out


def chain(word, thresholds) -> object:
    """``<a1>q1 ... <ak>qk T`` for the given word and thresholds."""
    phi = Top()
    for a, q in reversed(list(zip(word, thresholds))):
        phi = Diamond(a, q, phi)
    return phi


def qchain(word) -> object:
    """``<a1>c ... <ak>c 1``: the discounted trace mass of ``word``."""
    phi = One()
    for a in reversed(tuple(word)):
        phi = DiamondC(a, phi)
    return phi
