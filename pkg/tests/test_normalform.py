import random
from itertools import product

import pytest
from hypothesis import given, settings

from bapal.kripke import Checker, random_model
from bapal.normalform import Step, measure, normalize, replace, replay, to_aanf
from bapal.syntax import TOP, Ann, Atom, Box, Implies, Not, And, is_aanf, is_boolean, parse, to_text
from gen import formulas, random_formula

p, q, r = Atom("p"), Atom("q"), Atom("r")


def truth_table_equal(f, g, names):
    for bits in product([False, True], repeat=len(names)):
        env = dict(zip(names, bits))
        if _ev(f, env) != _ev(g, env):
            return False
    return True


def _ev(f, env):
    if isinstance(f, Atom):
        return env.get(f.name, False)
    if isinstance(f, Not):
        return not _ev(f.f, env)
    if isinstance(f, And):
        return _ev(f.l, env) and _ev(f.r, env)
    raise TypeError(f)


def test_ap():
    g, trace = to_aanf(parse("[p] q"))
    assert g == Not(And(p, Not(q)))
    assert [s.axiom for s in trace] == ["AP"]
    assert truth_table_equal(g, Implies(p, q), ["p", "q"])


def test_bare_box():
    g, trace = to_aanf(Box(p))
    assert g == Ann(TOP, Box(p))
    assert trace[0].axiom == "ABox"


def test_nested_announcements():
    g, trace = to_aanf(parse("[p][q] r"))
    assert is_boolean(g)
    expected = Implies(And(p, Implies(p, q)), r)
    assert truth_table_equal(g, expected, ["p", "q", "r"])
    assert {s.axiom for s in trace} <= {"AP", "AN", "AC", "AA"}


def test_already_normal():
    f = parse("[K a p] box q")
    g, trace = to_aanf(f)
    assert g == f and trace == []


def test_announced_box_is_normalized_first():
    g, _ = to_aanf(parse("[[p] box q] box r"))
    assert is_aanf(g)


@pytest.mark.parametrize("axiom,text", [
    ("AN", "[p] ~q"), ("AC", "[p] (q & r)"), ("AK", "[p] K a q"), ("AA", "[p][q] box r"),
])
def test_each_axiom_fires(axiom, text):
    _, trace = to_aanf(parse(text))
    assert trace[0].axiom == axiom


def test_replay_and_step_text():
    f = parse("[p & K a q] (K b r & [q] box p)")
    g, trace = to_aanf(f)
    assert replay(f, trace) == g
    assert all(measure(s.after) < measure(s.before) or s.axiom == "ABox" for s in trace)
    assert "=>" in str(trace[0])
    bad = [Step("AP", (), parse("[q] p"), parse("q -> p"))]
    with pytest.raises(ValueError):
        replay(f, bad)


def test_measure_decreases_along_trace():
    rng = random.Random(2)
    for _ in range(200):
        f = random_formula(rng, 4)
        seen = []
        to_aanf(f, on_step=seen.append)
        cur = f
        last = measure(cur)
        for s in seen:
            cur = replace(cur, s.path, s.after)
            assert measure(cur) < last
            last = measure(cur)


@settings(max_examples=200, deadline=None)
@given(formulas(max_leaves=10))
def test_output_is_aanf(f):
    g, trace = to_aanf(f)
    assert is_aanf(g) and is_aanf(normalize(f))
    assert replay(f, trace) == g


def test_semantic_equivalence_sampled():
    rng = random.Random(3)
    for i in range(300):
        f = random_formula(rng, 4)
        m = random_model(i, 4, 3)
        g = to_aanf(f)[0]
        chk = Checker(m)
        assert chk.ext(f) == chk.ext(g), to_text(f)
