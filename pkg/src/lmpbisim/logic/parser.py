"""Recursive-descent parsers for the three formula grammars.

Distribution / state formulas::

    formula   := unary ("&" unary)*
    unary     := "!" unary | "<" IDENT ">" RATIONAL unary | atom
    atom      := "T" | "(" formula ")" | "eps>=" RATIONAL | "can(" IDENT ")" | "delta(" IDENT ")"

State formulas use ``"<" IDENT ">st" RATIONAL`` and only ``T``, ``&`` and
parentheses. Quantitative formulas::

    qformula  := qunary ("(+)" RATIONAL)*
    qunary    := "~" qunary | "<" IDENT ">c" qunary | "1" | "min(" qformula ("," qformula)* ")"
               | "(" qformula ")"

Prefix operators bind tighter than ``&`` and ``(+)``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import ParseError, ScopeError
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
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*")
_RATIONAL = re.compile(r"\d+\s*/\s*\d+|\d+\.\d*|\.\d+|\d+")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, lit: str) -> bool:
        self.ws()
        return self.text.startswith(lit, self.pos)

    def accept(self, lit: str) -> bool:
        if self.peek(lit):
            self.pos += len(lit)
            return True
        return False

    def expect(self, lit: str):
        if not self.accept(lit):
            self.fail(f"expected {lit!r}")

    def fail(self, msg, cls=ParseError):
        found = self.text[self.pos:self.pos + 10] or "end of input"
        raise cls(f"{msg}, found {found!r}", self.pos)

    def ident(self) -> str:
        self.ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            self.fail("expected an action label")
        self.pos = m.end()
        return m.group()

    def action_label(self) -> str:
        # labels inside <...> may be any run of non-'>' characters
        self.ws()
        end = self.text.find(">", self.pos)
        if end <= self.pos:
            self.fail("expected an action label")
        label = self.text[self.pos:end].strip()
        if not label or any(ch.isspace() for ch in label):
            self.fail("malformed action label")
        self.pos = end
        return label

    def rational(self) -> Fraction:
        self.ws()
        m = _RATIONAL.match(self.text, self.pos)
        if not m:
            self.fail("expected a rational number")
        start = self.pos
        self.pos = m.end()
        try:
            q = Fraction(m.group().replace(" ", ""))
        except ZeroDivisionError:
            self.pos = start
            self.fail("zero denominator")
        if not 0 <= q <= 1:
            self.pos = start
            self.fail(f"threshold {q} outside [0, 1]")
        return q

    def at_end(self):
        self.ws()
        if self.pos != len(self.text):
            self.fail("unexpected trailing input")

    def keyword(self, word: str) -> bool:
        """Accept ``word`` only when not followed by an identifier character."""
        self.ws()
        if self.text.startswith(word, self.pos):
            nxt = self.pos + len(word)
            if nxt >= len(self.text) or not (self.text[nxt].isalnum() or self.text[nxt] == "_"):
                self.pos = nxt
                return True
        return False


class _FormulaParser(_Parser):
    def __init__(self, text, state_logic=False):
        super().__init__(text)
        self.state_logic = state_logic

    def formula(self, depth):
        parts = [self.unary(depth)]
        while self.accept("&"):
            parts.append(self.unary(depth))
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self, depth):
        if self.peek("!"):
            if self.state_logic:
                self.fail("negation is not part of the state logic")
            self.pos += 1
            return Not(self.unary(depth))
        if self.accept("<"):
            a = self.action_label()
            self.expect(">")
            if self.state_logic:
                if not self.text.startswith("st", self.pos):
                    self.fail("state diamonds are written <a>st q")
                self.pos += 2
                q = self.rational()
                return DiamondSt(a, q, self.unary(depth + 1))
            q = self.rational()
            return Diamond(a, q, self.unary(depth + 1))
        return self.atom(depth)

    def atom(self, depth):
        if self.keyword("T"):
            return Top()
        if self.accept("("):
            inner = self.formula(depth)
            self.expect(")")
            return inner
        if self.state_logic:
            self.fail("expected T, '(' or <a>st q")
        start = self.pos
        if self.accept("eps>="):
            if depth > 0:
                self.pos = start
                self.fail("eps>=q may not appear in the scope of a diamond", ScopeError)
            return EpsAtLeast(self.rational())
        if self.accept("can("):
            a = self.ident()
            self.expect(")")
            return Can(a)
        if self.accept("delta("):
            a = self.ident()
            self.expect(")")
            return Delta(a)
        self.fail("expected a formula")


class _QParser(_Parser):
    def qformula(self):
        phi = self.qunary()
        while self.accept("(+)"):
            phi = OPlus(phi, self.rational())
        return phi

    def qunary(self):
        if self.accept("~"):
            return Neg(self.qunary())
        if self.accept("<"):
            a = self.action_label()
            self.expect(">")
            if not self.text.startswith("c", self.pos):
                self.fail("quantitative diamonds are written <a>c")
            self.pos += 1
            return DiamondC(a, self.qunary())
        if self.accept("min("):
            parts = [self.qformula()]
            while self.accept(","):
                parts.append(self.qformula())
            self.expect(")")
            return Conj(tuple(parts))
        if self.peek("(+)"):
            self.fail("expected a quantitative formula")
        if self.accept("("):
            inner = self.qformula()
            self.expect(")")
            return inner
        if self.keyword("1"):
            return One()
        self.fail("expected a quantitative formula")


def parse_formula(text: str):
    p = _FormulaParser(text)
    phi = p.formula(0)
    p.at_end()
    return phi


def parse_state_formula(text: str):
    p = _FormulaParser(text, state_logic=True)
    phi = p.formula(0)
    p.at_end()
    return phi


def parse_qformula(text: str):
    p = _QParser(text)
    phi = p.qformula()
    p.at_end()
    return phi
