"""Qualitative and quantitative modal logics over finite LMPs."""

from .evaluate import (
    FormulaEvaluator,
    QEvaluator,
    chain_qformulas,
    embed_state_formula,
    eval_formula,
    eval_qformula,
    eval_state_formula,
    find_distinguishing_formula,
    logical_distance_lower,
    sat_set,
    to_cnf,
)
from .parser import parse_formula, parse_qformula, parse_state_formula
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
    chain,
    depth,
    qchain,
)

__all__ = [
    "And", "Can", "Conj", "Delta", "Diamond", "DiamondC", "DiamondSt", "EpsAtLeast",
    "FormulaEvaluator", "QEvaluator", "Neg", "Not", "One", "OPlus", "Top", "chain", "chain_qformulas",
    "depth", "embed_state_formula", "eval_formula", "eval_qformula", "eval_state_formula",
    "find_distinguishing_formula", "logical_distance_lower", "parse_formula",
    "parse_qformula", "parse_state_formula", "qchain", "sat_set", "to_cnf",
]
