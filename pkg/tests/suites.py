"""Curated formula suites used by the acceptance tests and the experiment scripts."""

# Quantifier depth 0.  Outcomes were computed by exhaustive model search over
# models of up to 2^(d+1) worlds and frozen here.
D0 = [
    ("p & ~p", "unsat"),
    ("K a p & ~p", "unsat"),
    ("p & ~K a p", "sat"),
    ("K a p & K a ~p", "unsat"),
    ("K a p -> p", "sat"),
    ("~(K a p -> p)", "unsat"),
    ("K a p & Khat a ~p", "unsat"),
    ("K a p & ~K b p", "sat"),
    ("Khat a p & ~p", "sat"),
    ("p & K b ~p", "unsat"),
    ("Khat a (p & ~p)", "unsat"),
    ("K a q & Khat a ~q", "unsat"),
    ("K a (p & q) & ~K a p", "unsat"),
    ("K a p & K a q & ~K a (p & q)", "unsat"),
    ("K a (p | q) & ~K a p & ~K a q", "sat"),
    ("K a (p -> q) & K a p & ~q", "unsat"),
    ("K a (p -> q) & K a p & ~K a q", "unsat"),
    ("Khat a p & Khat a ~p", "sat"),
    ("Khat a p & Khat a q & ~Khat a (p & q)", "sat"),
    ("K a p & K b q & ~(p & q)", "unsat"),
    ("K a p & K b ~q & Khat a q", "sat"),
    ("~K a p & ~K a ~p & p", "sat"),
    ("K a p & ~K b p & Khat b ~p", "sat"),
    ("K b p & Khat b ~p", "unsat"),
    ("[p] K a p", "sat"),
    ("[p] ~K a p", "sat"),
    ("p & [p] ~K a p", "unsat"),
    ("~p & [p] q", "sat"),
    ("[p] q & p & ~q", "unsat"),
    ("[K a p] ~p", "sat"),
    ("K a p & [K a p] ~p", "unsat"),
    ("[~K a p] K a p", "sat"),
    ("~K a p & [~K a p] K a p", "unsat"),
    ("[p & q] K a p & p & q & ~K a p", "sat"),
    ("[q] K a p & q & ~K a (q -> p)", "unsat"),
    ("K a Khat b p & ~p", "sat"),
    ("K a p & K b q & Khat a ~p", "unsat"),
    ("K a (p | q) & Khat a (~p & ~q)", "unsat"),
    ("p & Khat a ~p & Khat b Khat a ~p", "sat"),
    ("K b (p & ~q) & Khat b q", "unsat"),
]

# Quantifier depth at most one, in normal form, for the phi-image check.
IMAGE = [
    "[p] box K a q",
    "[true] box p",
    "[true] box (p -> K a p)",
    "~[true] box ~K a p",
    "[K a p] box q",
    "p & [q] box ~K b p",
    "K a [p] box (q | K b q)",
    "[true] box (Khat a p | Khat b ~p)",
    "[p & q] box K a (p | ~q)",
    "~[~K b q] box K a ~p & K b q",
]


def fig3_pseudo_model():
    """Five states a, b, c, x, y with x ~2 a ~1 b ~1 c ~2 y and two hue atoms."""
    from bapal.decide import MaximalSet, decision_table, pseudo_model
    from bapal.normalform import normalize
    from bapal.syntax import Atom, parse

    phi = normalize(parse("K 1 (dia K 1 K 2 ~x & dia K 1 K 2 ~y & box (Khat 1 K 2 ~x | Khat 1 K 2 ~y))"))
    names = ["a", "b", "c", "x", "y"]
    colour = {"x": {Atom("x")}, "y": {Atom("y")}}
    hue = {"a": {"p0"}, "b": {"p0", "p1"}, "c": {"p1"}, "x": {"p0"}, "y": {"p1"}}
    states = [MaximalSet(frozenset(colour.get(n, ())), frozenset(hue[n])) for n in names]
    bit = {n: 1 << i for i, n in enumerate(names)}
    rel = {"1": [bit["a"] | bit["b"] | bit["c"], bit["x"], bit["y"]],
           "2": [bit["x"] | bit["a"], bit["c"] | bit["y"], bit["b"]]}
    return pseudo_model(decision_table(phi), states, rel, ("p0", "p1"), names, ("1", "2"))


# First three act-atom indices per (copy, hue atom) as drawn for copies 1 and 2,
# and extended to copy 3 by the same rule.
FIG3_ROWS = {
    1: {0: [1, 3, 5], 1: [1, 2, 4]},
    2: {0: [2, 6, 10], 1: [1, 2, 4]},
    3: {0: [1, 3, 5], 1: [3, 6, 12]},
}
