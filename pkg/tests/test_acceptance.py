"""Acceptance criteria 1-10, one test each, at the stated scales and tolerances."""

from __future__ import annotations

import contextlib
import io
import itertools
import random
import time
from fractions import Fraction

from randmodels import (
    brute_truncated,
    oracle_equivalent,
    random_dist,
    random_model,
    random_pair,
    random_row,
    word_vectors,
)

from lmpbisim import cli
from lmpbisim.compose import check_composition_bound, compose, product_dist
from lmpbisim.equivalence import (
    Approx,
    approx_bisim,
    check_state_implies_dist,
    decide_dbisim,
    disjoint_union,
    truncated_distance,
)
from lmpbisim.fixtures import fig1, fig1_side
from lmpbisim.kernels import cantor_interval, cantor_set_approx, make_cantor, make_ex1
from lmpbisim.logic import (
    And,
    Can,
    Delta,
    Diamond,
    EpsAtLeast,
    FormulaEvaluator,
    Not,
    Top,
    chain_qformulas,
    find_distinguishing_formula,
    logical_distance_lower,
)
from lmpbisim.model import FiniteLmp, SubDist, dirac, mix, save_model
from lmpbisim.semantics import trace_mass

F = Fraction


def _run_cli(argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = cli.main(argv)
    return code, out.getvalue()


def test_c01_fig1_equivalence(criterion, tmp_path):
    path = tmp_path / "fig1.json"
    save_model(fig1(), path)
    t0 = time.perf_counter()
    code, out = _run_cli(["check-equiv", str(path), "--mu", "dirac:s0", "--nu", "dirac:t0"])
    rcode, rout = _run_cli(["refine", str(path)])
    elapsed = time.perf_counter() - t0
    import json

    blocks = json.loads(rout)["blocks"]
    split = not any("s0" in b and "t0" in b for b in blocks)
    ok = code == 0 and json.loads(out)["equivalent"] is True and rcode == 0 and split and elapsed < 1
    criterion(1, "fig1 equivalence", ok, f"exit {code}, s0/t0 split={split}, {elapsed:.3f}s")
    assert ok


def test_c02_ex1_counterexample(criterion, tmp_path):
    import json

    failures = []
    for n in (2, 8, 64):
        m = make_ex1(n)
        for start, expected in (("0", F(1, 8)), ("1", F(7, 48))):
            mu = dirac(m, start)
            from lmpbisim.semantics import run_word

            after = run_word(m, mu, "aa")
            atoms = (after[m.index("0")], after[m.index("1")])
            if atoms != (expected, expected) or not all(isinstance(x, Fraction) for x in atoms):
                failures.append((n, start, atoms))
        path = tmp_path / f"ex1_{n}.json"
        save_model(m, path)
        code, out = _run_cli(["check-equiv", str(path), "--mu", "dirac:0", "--nu", "dirac:1"])
        res = json.loads(out)
        if code != 1 or res["equivalent"] or res["witness"] != ["a", "a"] or not res["formula"]:
            failures.append((n, "cli", res))
        phi = find_distinguishing_formula(m, dirac(m, "0"), dirac(m, "1"))
        ev = FormulaEvaluator(m)
        if ev.holds(dirac(m, "0"), phi) == ev.holds(dirac(m, "1"), phi):
            failures.append((n, "formula", str(phi)))
    criterion(2, "[0,1] counterexample", not failures, f"failures={failures}")
    assert not failures


def test_c03_oracle_equivalence(criterion):
    rng = random.Random(3)
    t0 = time.perf_counter()
    disagreements = equal = 0
    for _ in range(500):
        m = random_model(rng, max_n=6, max_k=3)
        vectors = word_vectors(m, m.n)
        for _ in range(200):
            mu, nu = random_pair(rng, m)
            got = decide_dbisim(m, mu, nu)
            disagreements += got != oracle_equivalent(vectors, mu, nu)
            equal += got
    elapsed = time.perf_counter() - t0
    ok = disagreements == 0 and elapsed < 60
    criterion(3, "oracle equivalence", ok,
              f"{disagreements} disagreements over 100000 pairs ({equal} equivalent), {elapsed:.1f}s")
    assert ok


def test_c04_metric_properties(criterion):
    rng = random.Random(4)
    H = 8
    violations = []
    for i in range(200):
        m = random_model(rng, max_n=4, max_k=2)
        m1, m2, m3 = (random_dist(rng, m.n) for _ in range(3))
        for c in (F(1, 2), F(9, 10), F(1)):
            d = lambda x, y, c=c: truncated_distance(m, x, y, c, H)
            d12, d21, d23, d13 = d(m1, m2), d(m2, m1), d(m2, m3), d(m1, m3)
            if d12 != d21:
                violations.append((i, "symmetry", c))
            if d(m1, m1) != 0:
                violations.append((i, "identity", c))
            if d13 > d12 + d23:
                violations.append((i, "triangle", c))
            if i < 20 and d12 != brute_truncated(m, m1, m2, c, H):
                violations.append((i, "brute-force value", c))
        # larger discount, larger truncated distance
        ds = [truncated_distance(m, m1, m2, c, H) for c in (F(1, 4), F(1, 2), F(9, 10), F(1))]
        if any(x > y for x, y in zip(ds, ds[1:])):
            violations.append((i, "discount monotonicity", ds))
        # YES at eps stays YES at every larger eps
        eps_grid = [F(0), F(1, 20), F(1, 8), F(1, 4), F(1, 2), F(1)]
        verdicts = [approx_bisim(m, m1, m2, e, F(1, 2), tol=F(1, 10**6)).verdict for e in eps_grid]
        seen_yes = False
        for v in verdicts:
            if seen_yes and v is not Approx.YES:
                violations.append((i, "epsilon monotonicity", verdicts))
            seen_yes = seen_yes or v is Approx.YES
    criterion(4, "metric properties", not violations, f"{len(violations)} violations over 200 models")
    assert not violations


def test_c05_state_implies_dist(criterion):
    rng = random.Random(5)
    pairs = len(check_state_implies_dist(fig1()))
    violations = 0
    for _ in range(200):
        m = random_model(rng, max_n=6, max_k=3, dup=rng.random() < 0.7)
        try:
            pairs += len(check_state_implies_dist(m))
        except AssertionError:
            violations += 1
    criterion(5, "state bisimilarity implies distribution bisimilarity", violations == 0,
              f"{pairs} state-bisimilar pairs checked, {violations} violations")
    assert violations == 0


def test_c06_linearity(criterion):
    rng = random.Random(6)
    checked = violations = 0
    for _ in range(200):
        m = random_model(rng, max_n=6, max_k=3, dup=True)
        verified = []
        for _ in range(30):
            mu, nu = random_pair(rng, m)
            if decide_dbisim(m, mu, nu):
                verified.append((mu, nu))
        for _ in range(10):
            if not verified:
                break
            k = rng.randint(1, min(3, len(verified)))
            chosen = rng.sample(verified, k)
            weights = [F(rng.randint(0, 6), 6 * k) for _ in chosen]
            left = mix(list(zip(weights, (p[0] for p in chosen))), size=m.n)
            right = mix(list(zip(weights, (p[1] for p in chosen))), size=m.n)
            checked += 1
            violations += not decide_dbisim(m, left, right)
    ok = violations == 0 and checked > 0
    criterion(6, "linearity", ok, f"{checked} mixes of verified pairs, {violations} violations")
    assert ok


def _perturb(rng: random.Random, m: FiniteLmp) -> FiniteLmp:
    trans = {a: list(m.trans[a]) for a in m.actions}
    for _ in range(rng.randint(1, 2)):
        a = rng.choice(m.actions)
        trans[a][rng.randrange(m.n)] = random_row(rng, m.n)
    return FiniteLmp(m.state_names, m.actions, trans, m.initial)


def _split_state(rng: random.Random, m: FiniteLmp) -> FiniteLmp:
    """Copy state 0 and divide every incoming edge between the copies."""
    n = m.n
    names = m.state_names + (m.state_names[0] + "'",)
    share = F(rng.randint(0, 4), 4)
    trans = {}
    for a in m.actions:
        rows = []
        for row in list(m.trans[a]) + [m.trans[a][0]]:
            rows.append((row[0] * share,) + tuple(row[1:n]) + (row[0] * (1 - share),))
        trans[a] = rows
    pi = m.initial.mass
    init = SubDist((pi[0] * share,) + tuple(pi[1:]) + (pi[0] * (1 - share),))
    return FiniteLmp(names, m.actions, trans, init)


def test_c07_composition(criterion):
    rng = random.Random(7)
    product_failures = 0
    for _ in range(100):
        k = rng.randint(1, 2)
        m1 = random_model(rng, max_n=4, k=k)
        m2 = random_model(rng, max_n=4, k=k)
        mu1, mu2 = random_dist(rng, m1.n), random_dist(rng, m2.n)
        w = tuple(rng.choice(m1.actions) for _ in range(rng.randint(0, 6)))
        prod = compose(m1, m2)
        lhs = trace_mass(prod, product_dist(mu1, mu2), w)
        product_failures += lhs != trace_mass(m1, mu1, w) * trace_mass(m2, mu2, w)

    bound_failures = 0
    for i in range(100):
        k = rng.randint(1, 2)
        m1 = random_model(rng, max_n=3, k=k)
        m2 = random_model(rng, max_n=3, k=k)
        m1p, m2p = _perturb(rng, m1), _perturb(rng, m2)
        c = (F(1), F(9, 10), F(1, 2))[i % 3]
        report = check_composition_bound(m1, m1p, m2, m2p, c, 8, strict=False)
        bound_failures += not report.holds

    corollary_failures = checked = 0
    for _ in range(30):
        m1 = random_model(rng, max_n=6, max_k=2)
        m1p = _split_state(rng, m1)
        m2 = random_model(rng, max_n=6, k=len(m1.actions))
        if (m1.n + m1p.n) * m2.n > 400:
            continue
        u1, p, q = disjoint_union(m1, m1p)
        if not decide_dbisim(u1, p, q):
            corollary_failures += 1
            continue
        u, p, q = disjoint_union(compose(m1, m2), compose(m1p, m2))
        checked += 1
        corollary_failures += not decide_dbisim(u, p, q)
    s_side, t_side = fig1_side("s"), fig1_side("t")
    m2 = random_model(rng, n=5, k=1)
    u, p, q = disjoint_union(compose(s_side, m2), compose(t_side, m2))
    checked += 1
    corollary_failures += not decide_dbisim(u, p, q)

    ok = not (product_failures or bound_failures or corollary_failures)
    criterion(7, "composition", ok,
              f"product identity {product_failures}/100 failures, bound {bound_failures}/100, "
              f"composed equivalence {corollary_failures}/{checked}")
    assert ok


def test_c08_cantor(criterion):
    m = make_cantor(6, 3)
    eq = [decide_dbisim(m, cantor_interval(m, n), cantor_set_approx(m, n)) for n in (1, 2, 3)]
    delta0 = dirac(m, "x0")
    dists = [truncated_distance(m, delta0, cantor_set_approx(m, n), 1, 6) for n in range(5)]
    mono = all(x >= y for x, y in zip(dists, dists[1:]))
    ok = all(eq) and mono
    criterion(8, "Cantor example", ok, f"bisimilar n=1..3: {eq}; distances {[str(d) for d in dists]}")
    assert ok


def _formulas(actions, depth):
    qs = (F(0), F(1, 4), F(1, 2), F(3, 4), F(1))
    level = [Top()]
    out = [Top()]
    for _ in range(depth):
        level = [Diamond(a, q, sub) for a in actions for q in qs for sub in level]
        out.extend(level)
    out.extend(EpsAtLeast(q) for q in qs)
    for a in actions:
        out.extend([Can(a), Delta(a), Not(Can(a))])
    extra = [And((x, y)) for x, y in itertools.islice(itertools.combinations(out[1:40], 2), 60)]
    out.extend(extra)
    out.extend(Not(x) for x in out[1:30])
    return out


def test_c09_logic(criterion):
    rng = random.Random(9)
    violations = pairs_eq = pairs_neq = 0
    for _ in range(100):
        m = random_model(rng, max_n=4, max_k=2)
        formulas = _formulas(m.actions, 3)
        ev = FormulaEvaluator(m)
        for _ in range(4):
            mu, nu = random_pair(rng, m)
            if decide_dbisim(m, mu, nu):
                pairs_eq += 1
                violations += any(ev.holds(mu, f) != ev.holds(nu, f) for f in formulas)
            else:
                pairs_neq += 1
                phi = find_distinguishing_formula(m, mu, nu)
                violations += ev.holds(mu, phi) == ev.holds(nu, phi)
    criterion(9, "logic soundness and completeness", violations == 0,
              f"{pairs_eq} equivalent and {pairs_neq} inequivalent pairs, {violations} violations")
    assert violations == 0


def test_c10_quantitative_logic(criterion):
    rng = random.Random(10)
    H = 8
    mismatches = 0
    for _ in range(100):
        m = random_model(rng, max_n=4, max_k=2)
        mu, nu = random_pair(rng, m)
        chains = chain_qformulas(m.actions, H)
        for c in (F(1), F(1, 2)):
            logical = logical_distance_lower(m, mu, nu, c, chains)
            mismatches += logical != truncated_distance(m, mu, nu, c, H)
    criterion(10, "quantitative logic", mismatches == 0, f"{mismatches} mismatches over 200 cases")
    assert mismatches == 0
