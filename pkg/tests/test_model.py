import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st
from randmodels import models, random_dist

from lmpbisim.errors import (
    DimensionMismatch,
    InvariantError,
    MassExceeded,
    ParseError,
    UnknownAction,
    UnknownState,
)
from lmpbisim.fixtures import fig1
from lmpbisim.model import (
    FiniteLmp,
    SubDist,
    dirac,
    dumps_model,
    from_dict,
    load_model,
    mix,
    parse_rational,
    save_model,
    uniform,
    zero_dist,
)


def test_parse_rational_forms():
    assert parse_rational("1/3") == F(1, 3)
    assert parse_rational("0.25") == F(1, 4)
    assert parse_rational(1) == F(1)
    with pytest.raises(ParseError):
        parse_rational("one half")


def test_subdist_rejects_excess_mass():
    with pytest.raises(MassExceeded):
        SubDist((F(2, 3), F(1, 2)))
    with pytest.raises(InvariantError):
        SubDist((F(-1, 2), F(1, 2)))


def test_subdist_float_slack():
    SubDist((0.5, 0.5 + 1e-12))
    with pytest.raises(MassExceeded):
        SubDist((0.5, 0.51))


def test_fig1_shape():
    m = fig1()
    assert m.n == 11 and m.actions == ("a",) and m.exact
    assert m.row_sum("a", "s1") == 1
    assert m.row_sum("a", "t4") == 0


def test_row_sum_above_one_is_located():
    rows = [[F(1, 2), F(2, 3)], [F(0), F(0)]]
    with pytest.raises(InvariantError, match="row"):
        FiniteLmp(("x", "y"), ("a",), {"a": rows}, SubDist((F(1), F(0))))


def test_missing_action_matrix():
    with pytest.raises((InvariantError, ParseError)):
        FiniteLmp(("x",), ("a", "b"), {"a": [[F(1)]]}, SubDist((F(1),)))


def test_dimension_checks():
    m = fig1()
    with pytest.raises(DimensionMismatch):
        m.check_dist(SubDist((F(1),)))
    with pytest.raises(DimensionMismatch):
        mix([(F(1, 2), SubDist((F(1),))), (F(1, 2), SubDist((F(1), F(0))))])


def test_unknown_names():
    m = fig1()
    with pytest.raises(UnknownState):
        dirac(m, "nope")
    with pytest.raises(UnknownAction):
        m.check_action("b")


def test_json_round_trip(tmp_path):
    m = fig1()
    path = tmp_path / "m.json"
    save_model(m, path)
    back = load_model(path)
    assert back.state_names == m.state_names
    assert back.trans == m.trans and back.initial == m.initial
    assert json.loads(dumps_model(back)) == json.loads(dumps_model(m))


def test_rational_file_rejects_float_entries():
    data = json.loads(dumps_model(fig1()))
    data["initial"][0] = 1.0
    with pytest.raises(ParseError, match="initial"):
        from_dict(data)


@pytest.mark.parametrize("key", ["numeric", "states", "actions", "transitions", "initial"])
def test_missing_keys(key):
    data = json.loads(dumps_model(fig1()))
    del data[key]
    with pytest.raises(ParseError):
        from_dict(data)


def test_load_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        load_model(p)


def test_uniform_and_zero():
    m = fig1()
    u = uniform(m, ["s0", "t0"])
    assert u[m.index("s0")] == F(1, 2) and u.total() == 1
    assert zero_dist(m).total() == 0


@given(models())
def test_random_model_round_trips(m):
    assert from_dict(json.loads(dumps_model(m))).trans == m.trans


@given(st.integers(0, 2**32 - 1))
def test_mix_is_entrywise_weighted_sum(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 5)
    mus = [random_dist(rng, n) for _ in range(3)]
    ws = [F(rng.randint(0, 3), 9) for _ in mus]
    out = mix(list(zip(ws, mus)))
    for i in range(n):
        assert out[i] == sum(w * mu[i] for w, mu in zip(ws, mus))
    assert out.total() == sum(w * mu.total() for w, mu in zip(ws, mus))


def test_mix_overflow_raises():
    d = SubDist((F(1), F(0)))
    with pytest.raises(MassExceeded):
        mix([(F(3, 4), d), (F(1, 2), d)])


def test_integer_form_scales_exactly():
    m = fig1()
    D, mats = m.integer_form
    assert D == 6
    for i, row in enumerate(m.trans["a"]):
        assert [F(int(x), D) for x in mats["a"][i]] == list(row)
