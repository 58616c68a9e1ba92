import pytest

from bapal import fmp
from bapal.kripke import Checker, check, make_model, valuation_classes
from bapal.syntax import TOP, Atom, Know, modal_depth, quantifier_depth, parse


def test_formula_shape():
    cs = fmp.conjuncts()
    assert len(cs) == 5
    f = fmp.fmp_formula()
    assert quantifier_depth(f) == 1 and modal_depth(f) == 3
    assert [quantifier_depth(c) for c in cs] == [0, 0, 0, 1, 1]


class TestNearMiss:
    def test_fifth_conjunct_fails(self):
        m = fmp.fig1_model()
        assert not check(m, "A", fmp.fmp_formula())
        assert fmp.failing_conjuncts(m, "A") == [5]

    def test_literal_drawing(self):
        m = fmp.fig1_model(literal=True)
        assert fmp.failing_conjuncts(m, "A") == [4]
        assert len(valuation_classes(m)) == 3

    def test_types(self):
        m = fmp.fig1_model()
        chk = Checker(m)
        assert [m.names[w] for w in range(4) if chk.holds(w, fmp.TYPE_A)] == ["A"]
        assert [m.names[w] for w in range(4) if chk.holds(w, fmp.TYPE_B)] == ["B"]

    def test_psi_replay(self):
        out = fmp.psi_replay()
        assert out["kept"] == ["B", "C", "D"]
        assert out["K_b K^_a ~x at B"] and not out["K^_b typeA at B"]
        assert out["type A survivors"] == []


class TestTruncation:
    def test_first_four_conjuncts(self):
        m = fmp.fig2_truncation(3)
        assert fmp.failing_conjuncts(m, "A0") == [5]

    def test_b_worlds_one_class(self):
        m = fmp.fig2_truncation(4)
        cls = [set(m.names[w] for w in range(m.size) if c.members >> w & 1) for c in valuation_classes(m)]
        assert {"B0", "B1", "B2", "B3"} in cls

    def test_bad_copies(self):
        with pytest.raises(ValueError):
            fmp.fig2_truncation(0)


class TestSearch:
    def test_none_up_to_three(self):
        r = fmp.finite_search(3)
        assert r.outcome == "none_found" and r.counterexample is None
        assert r.per_size[1] == 4 and sum(r.per_size.values()) == r.examined

    def test_finds_models_of_weaker_formulas(self):
        r = fmp.finite_search(4, parts=fmp.conjuncts()[:4])
        assert r.outcome == "counterexample"
        m = r.counterexample
        assert all(check(m, 0, c) for c in fmp.conjuncts()[:4])

    def test_box_part_reached(self):
        parts = [parse("x & box (x -> K a x)")]
        r = fmp.finite_search(2, parts=parts)
        assert r.outcome == "counterexample"

    def test_refining_partitions(self):
        parts = list(fmp.refining_partitions(3, [0b011, 0b100]))
        assert len(parts) == 2
        assert all(sum(p) == 0b111 for p in parts)

    def test_canonical_orbits(self):
        # one-world models: 2 x 2 valuations of x and y, nothing to permute
        assert fmp.finite_search(1).per_size[1] == 4

    def test_json(self):
        out = fmp.finite_search(2).to_json()
        assert out["outcome"] == "none_found" and set(out["per_size"]) == {"1", "2"}

    def test_bad_bound(self):
        with pytest.raises(ValueError):
            fmp.finite_search(0)


def test_agent_sanity():
    m = make_model(["u"], {"a": [["u"]], "b": [["u"]]}, {"x": ["u"]})
    assert check(m, "u", Know("a", Atom("x"))) and check(m, "u", TOP)
