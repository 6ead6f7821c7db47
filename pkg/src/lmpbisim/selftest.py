"""Reproduces the worked examples on small fixed models."""

from __future__ import annotations

from fractions import Fraction as F

from .compose import compose
from .equivalence import (
    check_state_implies_dist,
    dbisim_witness,
    decide_dbisim,
    disjoint_union,
    distance,
    state_bisim_partition,
)
from .fixtures import fig1, fig1_side, half_loop
from .kernels import cantor_interval, cantor_set_approx, make_cantor, make_ex1
from .logic import eval_formula, find_distinguishing_formula, parse_formula
from .model import dirac, mix
from .semantics import run_word


def _fig1_dbisim():
    m = fig1()
    return decide_dbisim(m, dirac(m, "s0"), dirac(m, "t0")), "s0 ~d t0"


def _fig1_not_state_bisim():
    part = state_bisim_partition(fig1())
    return not part.same_block("s0", "t0"), f"{len(part.blocks)} blocks"


def _fig1_relation():
    # every pair in the witnessing relation must be trace equivalent
    m = fig1()
    d = lambda s: dirac(m, s)
    pairs = [
        (d("s1"), mix([(F(1, 2), d("t1")), (F(1, 2), d("t2"))])),
        (mix([(F(1, 2), d("s2")), (F(1, 2), d("s3"))]),
         mix([(F(1, 6), d("t3")), (F(1, 3), d("t4")), (F(1, 6), d("t5")), (F(1, 3), d("t6"))])),
        (mix([(F(1, 2), d("s2"))]), mix([(F(1, 6), d("t3")), (F(1, 3), d("t6"))])),
    ]
    return all(decide_dbisim(m, a, b) for a, b in pairs), f"{len(pairs)} related pairs"


def _state_implies_dist():
    pairs = check_state_implies_dist(fig1())
    return True, f"{len(pairs)} state-bisimilar pairs verified"


def _ex1_masses():
    got = []
    for n in (2, 8, 64):
        m = make_ex1(n)
        a = run_word(m, dirac(m, "0"), "aa")
        b = run_word(m, dirac(m, "1"), "aa")
        got.append((a[0], a[1], b[0], b[1]))
    ok = all(g == (F(1, 8), F(1, 8), F(7, 48), F(7, 48)) for g in got)
    return ok, "1/8 and 7/48 for N in 2, 8, 64"


def _ex1_inequivalent():
    m = make_ex1(64)
    w = dbisim_witness(m, dirac(m, "0"), dirac(m, "1"))
    phi = find_distinguishing_formula(m, dirac(m, "0"), dirac(m, "1"))
    ok = w == ("a", "a") and eval_formula(m, dirac(m, "0"), phi) != eval_formula(m, dirac(m, "1"), phi)
    return ok, f"witness {''.join(w or ())}, formula {phi}"


def _ex1_distance():
    m = make_ex1(64)
    b = distance(m, dirac(m, "0"), dirac(m, "1"), 1, max_horizon=2)
    return b.lower == F(1, 24) and b.witness == ("a", "a"), f"lower {b.lower}"


def _half_loop():
    m = half_loop()
    phi = find_distinguishing_formula(m, dirac(m, "s"), dirac(m, "t"))
    return str(phi) == "<a>3/4 T", f"formula {phi}"


def _cantor():
    m = make_cantor(6, 3)
    ok = all(decide_dbisim(m, cantor_interval(m, n), cantor_set_approx(m, n)) for n in (1, 2, 3))
    return ok, "U([0,3^-n-1]) ~d U(E_n), n = 1..3"


def _composition():
    s, t = fig1_side("s"), fig1_side("t")
    hl = half_loop()
    ps, pt = compose(s, hl), compose(t, hl)
    union, p1, p2 = disjoint_union(ps, pt)
    return decide_dbisim(union, p1, p2), "s-side||M ~d t-side||M"


def _formula():
    m = fig1()
    phi = parse_formula("<a>1 <a>1 <a>1/2 T")
    psi = parse_formula("<a>1 <a>1 <a>0.6 T")
    ok = eval_formula(m, dirac(m, "s0"), phi) and not eval_formula(m, dirac(m, "s0"), psi)
    return ok, "<a>1 <a>1 <a>1/2 T holds, 0.6 does not"


CHECKS = [
    ("fig1: s0 ~d t0", _fig1_dbisim),
    ("fig1: witnessing relation", _fig1_relation),
    ("fig1: s0, t0 not state bisimilar", _fig1_not_state_bisim),
    ("state bisim implies dist bisim", _state_implies_dist),
    ("ex1: two-step masses", _ex1_masses),
    ("ex1: 0, 1 not equivalent", _ex1_inequivalent),
    ("ex1: distance 1/24", _ex1_distance),
    ("half loop: formula", _half_loop),
    ("cantor: bisimilar pairs", _cantor),
    ("composition preserves ~d", _composition),
    ("formula evaluation", _formula),
]


def run_selftest() -> list[dict]:
    rows = []
    for name, fn in CHECKS:
        try:
            passed, detail = fn()
        except Exception as exc:  # report, keep going
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append({"name": name, "passed": bool(passed), "detail": detail})
    return rows
