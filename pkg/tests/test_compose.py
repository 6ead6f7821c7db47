import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st
from randmodels import random_dist, random_model

from lmpbisim.compose import check_composition_bound, compose, product_dist
from lmpbisim.equivalence import decide_dbisim, disjoint_union
from lmpbisim.errors import ActionMismatch, SizeLimit
from lmpbisim.fixtures import fig1_side, from_edges, half_loop, loop
from lmpbisim.semantics import trace_mass


def test_state_names_and_initial():
    p = compose(half_loop(), loop(F(1, 2), name="u"))
    assert p.state_names == ("s|u", "t|u")
    assert p.initial.mass == (F(1), F(0))
    assert p.trans["a"][0][0] == F(1, 2)


@given(st.integers(0, 2**32 - 1))
def test_product_trace_identity(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 2)
    m1, m2 = random_model(rng, max_n=4, k=k), random_model(rng, max_n=4, k=k)
    mu1, mu2 = random_dist(rng, m1.n), random_dist(rng, m2.n)
    w = tuple(rng.choice(m1.actions) for _ in range(rng.randint(0, 5)))
    p = compose(m1, m2)
    assert trace_mass(p, product_dist(mu1, mu2), w) == trace_mass(m1, mu1, w) * trace_mass(m2, mu2, w)


def test_action_mismatch():
    other = from_edges(("x",), {("x", "x"): F(1)}, action="b")
    with pytest.raises(ActionMismatch):
        compose(loop(1), other)


def test_size_cap(monkeypatch):
    with pytest.raises(SizeLimit):
        compose(fig1_side("t"), fig1_side("t"), cap=10)
    monkeypatch.setenv("LMP_STATE_CAP", "5")
    with pytest.raises(SizeLimit):
        compose(half_loop(), fig1_side("s"))


def test_bound_trivial_case():
    m1, m2 = half_loop(), loop(F(1, 3))
    r = check_composition_bound(m1, m1, m2, m2, F(1, 2), 6)
    assert r.holds and r.composed.lower == 0 and r.bound == 0


def test_bound_half_loops():
    r = check_composition_bound(loop(1), loop(F(1, 2)), loop(1), loop(F(1, 2)), 1, 6)
    assert r.holds
    assert r.composed.lower == 1 - F(1, 4) ** 6
    assert r.to_json()["holds"] is True


def test_fig1_halves_compose_to_bisimilar():
    rng = random.Random(2)
    shared = random_model(rng, n=4, k=1)
    u, p, q = disjoint_union(compose(fig1_side("s"), shared), compose(fig1_side("t"), shared))
    assert decide_dbisim(u, p, q)


def test_float_composition():
    from lmpbisim.kernels import HeaterParams, make_heater

    h = make_heater(HeaterParams(temp_grid=(10, 30, 3)))
    assert not compose(h, h).exact
