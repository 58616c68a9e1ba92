import json
import random

import pytest

from bapal import fmp
from bapal.kripke import (Checker, Model, ModelError, all_models, all_partitions, bits,
                          bounded_boolean_box, characteristic_length, check, class_masks,
                          extension, extension_names, from_json, load, make_model, random_model,
                          restrict, save, to_dot, to_json, valuation_classes)
from bapal.syntax import And, Atom, Box, Know, Not, parse
from gen import random_formula

p = Atom("p")


def two_worlds():
    return make_model(["s", "t"], {"a": [["s", "t"]]}, {"p": ["s"]}, designated="s")


class TestRestrict:
    def test_identity(self):
        m = random_model(3, 5, 2)
        r = restrict(m, m.full)
        assert r.names == m.names and r.valuation == m.valuation and r.blocks == m.blocks

    def test_fig1_x(self):
        m = fmp.fig1_model()
        r = restrict(m, Checker(m).ext(Atom("x")))
        assert r.names == ("A", "B")
        assert r.blocks["b"] == (0b11,)
        assert r.blocks["a"] == (0b01, 0b10)

    def test_singleton_collapses_knowledge(self):
        m = random_model(7, 5, 3)
        r = restrict(m, 1 << 2)
        rng = random.Random(0)
        for _ in range(50):
            f = random_formula(rng, 3, atoms=("p", "q", "r"), boxes=False)
            assert check(r, 0, Know("a", f)) == check(r, 0, f)

    def test_designated(self):
        m = two_worlds()
        assert restrict(m, 0b01).designated == 0
        assert restrict(m, 0b10).designated is None

    def test_empty(self):
        with pytest.raises(ModelError):
            restrict(two_worlds(), 0)


class TestCheck:
    def test_box_p_implies_p(self):
        f = parse("box p -> p")
        for seed in range(100):
            m = random_model(seed, 5, 3)
            assert Checker(m).ext(f) == m.full

    def test_dia_know(self):
        assert check(two_worlds(), "s", parse("dia K a p"))
        assert not check(two_worlds(), "s", parse("K a p"))

    def test_fig1(self):
        m = fmp.fig1_model()
        assert not check(m, "A", fmp.fmp_formula())
        assert extension_names(m, Atom("x")) == ["A", "B"]
        assert extension(m, parse("p & ~p")) == frozenset()
        # C is also a-linked to a ~x & y world (itself); see the ledger
        assert extension_names(m, parse("Khat a (~x & y)")) == ["A", "C"]

    def test_unknown_world(self):
        with pytest.raises(ModelError):
            check(two_worlds(), "zz", p)

    def test_missing_agent_is_identity(self):
        m = two_worlds()
        assert check(m, "s", parse("K b p"))


class TestClasses:
    def test_fig1(self):
        assert len(valuation_classes(fmp.fig1_model())) == 4
        assert len(valuation_classes(fmp.fig1_model(literal=True))) == 3

    def test_single(self):
        m = random_model(0, 1, 1)
        assert m.size == 1 and len(valuation_classes(m)) == 1

    def test_fig2_b_worlds_share_class(self):
        m = fmp.fig2_truncation(3)
        bs = {m.world(f"B{i}") for i in range(3)}
        assert any(set(bits(c.members)) == bs for c in valuation_classes(m))

    def test_partition(self):
        m = random_model(11, 6, 2)
        ms = class_masks(m)
        assert sum(ms) == m.full and all(a & b == 0 for a in ms for b in ms if a != b)


class TestBoundedOracle:
    def test_agrees_on_fig1_boxes(self):
        m = fmp.fig1_model()
        L = characteristic_length(m)
        boxes = [g for c in fmp.conjuncts() for g in _boxes(c)]
        assert boxes
        for b in boxes:
            for w in range(m.size):
                assert bounded_boolean_box(m, w, b.f, L) == check(m, w, b)

    def test_short_bound_only_errs_towards_true(self):
        for seed in range(40):
            m = random_model(seed, 4, 2)
            body = parse("K a p | K b ~p")
            for w in range(m.size):
                if bounded_boolean_box(m, w, body, 1) is False:
                    assert not check(m, w, Box(body))


def _boxes(f):
    out = [f] if isinstance(f, Box) else []
    for c in f.children():
        out += _boxes(c)
    return out


class TestRandom:
    def test_deterministic(self):
        assert to_json(random_model(5, 5, 3)) == to_json(random_model(5, 5, 3))

    def test_unit_bounds(self):
        m = random_model(1, 1, 1, agents=1)
        assert m.size == 1

    def test_invariant_sweep(self):
        for seed in range(10_000):
            m = random_model(seed, 5, 3, agents=2)
            for a in m.agents:
                rows = [m.cell(a, w) for w in range(m.size)]
                for w in range(m.size):
                    assert rows[w] >> w & 1  # reflexive
                    for v in bits(rows[w]):
                        assert rows[v] == rows[w]  # symmetric and transitive

    def test_partition_counts(self):
        assert [sum(1 for _ in all_partitions(n)) for n in range(1, 6)] == [1, 2, 5, 15, 52]
        assert sum(1 for _ in all_models(2, ["p"], ["a"])) == 2 * 4


class TestSerialization:
    def test_round_trip(self, tmp_path):
        m = fmp.fig1_model()
        path = tmp_path / "m.json"
        save(m, path)
        n = load(path)
        assert to_json(n) == to_json(m)
        assert json.loads(path.read_text())["designated"] == "A"

    @pytest.mark.parametrize("data", [
        {"relations": {}},
        {"worlds": ["u"], "agents": ["a"], "relations": {}},
        {"worlds": ["u", "v"], "agents": ["a"], "relations": {"a": [["u"]]}},
        {"worlds": ["u"], "agents": ["a"], "relations": {"a": [["u", "u"]]}},
        {"worlds": ["u"], "agents": ["a"], "relations": {"a": [["v"]]}},
        {"worlds": ["u"], "agents": ["a"], "relations": {"a": [["u"]]}, "valuation": {"p": ["v"]}},
        {"worlds": ["u"], "agents": ["a"], "relations": {"a": [["u"]], "b": [["u"]]}},
    ])
    def test_malformed(self, data):
        with pytest.raises(ModelError):
            from_json(data)

    def test_bad_json_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ModelError):
            load(path)

    def test_dot(self):
        dot = to_dot(fmp.fig1_model())
        assert dot.startswith("graph model {")
        assert '"A" -- "C" [label="a"' in dot
        assert "doublecircle" in dot

    def test_not_a_partition(self):
        with pytest.raises(ModelError):
            Model(("u", "v"), ("a",), {"a": (0b11, 0b01)}, {})


def test_and_short_circuit_matches_definition():
    m = random_model(2, 6, 3)
    chk = Checker(m)
    f = And(parse("K a p"), Not(parse("K b q")))
    assert chk.ext(f) == chk.ext(f.l) & chk.ext(f.r)
