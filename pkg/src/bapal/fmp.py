"""A satisfiable formula without finite models, its near-miss models and a bounded search."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Optional

from .kripke import (Checker, Model, all_partitions, bits, characteristic, make_model, mask_of,
                     restrict, to_json as model_to_json)
from .syntax import (TOP, And, Atom, Box, Dia, Formula, Implies, Khat, Know, Not, Or, conj,
                     quantifier_depth, strip_double_negations, to_text)

x, y = Atom("x"), Atom("y")
TYPE_A = And(x, Khat("a", And(Not(x), y)))
TYPE_B = And(x, Khat("a", And(Not(x), Not(y))))


def conjuncts() -> list[Formula]:
    c1 = Know("b", conj([x, Khat("a", Not(x)),
                         Or(Know("a", Implies(Not(x), y)), Know("a", Implies(Not(x), Not(y))))]))
    c2 = Khat("b", TYPE_A)
    c3 = Khat("b", TYPE_B)
    c4 = Know("b", Implies(TYPE_A, Dia(Know("b", TYPE_A))))
    c5 = Know("b", Box(Implies(Know("b", Khat("a", Not(x))), Khat("b", TYPE_A))))
    return [c1, c2, c3, c4, c5]


def fmp_formula() -> Formula:
    return conj(conjuncts())


def failing_conjuncts(m: Model, w) -> list[int]:
    """1-based indices of the conjuncts false at w."""
    chk = Checker(m)
    w = m.world(w)
    return [i + 1 for i, c in enumerate(conjuncts()) if not chk.holds(w, c)]


def fig1_model(literal: bool = False) -> Model:
    """The four-world near miss.

    Drawn literally, A and B carry the same valuation, so no announcement
    separates them and the fourth conjunct already fails.  By default A also
    carries an extra atom p, which makes the fifth conjunct the only failure.
    """
    val = {"x": ["A", "B"], "y": ["C"]}
    if not literal:
        val["p"] = ["A"]
    return make_model(["A", "B", "C", "D"], {"a": [["A", "C"], ["B", "D"]], "b": [["A", "B"]]},
                      val, designated="A", agents=("a", "b"), metadata={"figure": 1, "literal": literal})


def fig2_truncation(copies: int) -> Model:
    """The first ``copies`` segments of the infinite model; A_i carries its own atom p_i."""
    if copies < 1:
        raise ValueError("copies must be at least 1")
    names = []
    for i in range(copies):
        names += [f"A{i}", f"B{i}", f"C{i}", f"D{i}"]
    rel = {"a": [[f"A{i}", f"C{i}"] for i in range(copies)] + [[f"B{i}", f"D{i}"] for i in range(copies)],
           "b": [[w for i in range(copies) for w in (f"A{i}", f"B{i}")]]}
    val = {"x": [w for i in range(copies) for w in (f"A{i}", f"B{i}")],
           "y": [f"C{i}" for i in range(copies)]}
    for i in range(copies):
        val[f"p{i}"] = [f"A{i}"]
    return make_model(names, rel, val, designated="A0", agents=("a", "b"),
                      metadata={"figure": 2, "copies": copies})


def psi_replay(m: Optional[Model] = None) -> dict:
    """Announce x -> ~phi_A, phi_A the characteristic Boolean of the designated world.

    On the near miss this keeps B and the top row, so K_b K^_a ~x holds at B
    while no type-A world survives.
    """
    m = m or fig1_model()
    s = m.designated
    announced = strip_double_negations(Implies(x, Not(characteristic(m, s))))
    keep = Checker(m).ext(announced)
    r = restrict(m, keep)
    chk = Checker(r)
    b = r.world("B") if "B" in r.names else None
    return {
        "announced": to_text(announced),
        "kept": [r.names[w] for w in range(r.size)],
        "K_b K^_a ~x at B": bool(b is not None and chk.holds(b, Know("b", Khat("a", Not(x))))),
        "type A survivors": [r.names[w] for w in bits(chk.ext(TYPE_A))],
        "K^_b typeA at B": bool(b is not None and chk.holds(b, Khat("b", TYPE_A))),
    }


# -- bounded search ----------------------------------------------------------

@dataclass
class FmpReport:
    max_worlds: int
    examined: int = 0
    outcome: str = "none_found"
    counterexample: Optional[Model] = None
    per_size: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"max_worlds": self.max_worlds, "examined": self.examined, "outcome": self.outcome,
                "per_size": {str(k): v for k, v in self.per_size.items()},
                "counterexample": model_to_json(self.counterexample) if self.counterexample else None}


def _canonical(n: int, pa, pb, vx: int, vy: int, perms) -> bool:
    """True if (pa, pb, vx, vy) is the least of its orbit under permutations fixing world 0."""
    def key(perm):
        def mp(mask):
            return mask_of(perm[w] for w in bits(mask))
        return (tuple(sorted(mp(b) for b in pa)), tuple(sorted(mp(b) for b in pb)), mp(vx), mp(vy))

    mine = key(tuple(range(n)))
    return all(key(p) >= mine for p in perms)


def refining_partitions(n: int, classes: list[int]):
    """Partitions of range(n) each of whose blocks lies inside one of the given classes."""
    per = []
    for c in classes:
        ws = list(bits(c))
        per.append([[mask_of(ws[i] for i in bits(b)) for b in part] for part in all_partitions(len(ws))])
    for combo in product(*per):
        yield [b for part in combo for b in part]


def finite_search(max_worlds: int, parts: Optional[list[Formula]] = None) -> FmpReport:
    """Exhaustive search for a finite pointed model of the formula, world 0 designated.

    Boolean announcements only see the partition of worlds into valuation
    classes, and n extra atoms realize any partition of n worlds, so the
    search ranges over x/y valuations plus every refinement of their classes.
    Box-free conjuncts are checked before any refinement.  ``parts``
    replaces the five conjuncts, which lets tests confirm the search finds
    models of weaker formulas.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    cs = conjuncts() if parts is None else list(parts)
    head = conj([c for c in cs if quantifier_depth(c) == 0] or [TOP])
    tail = conj([c for c in cs if quantifier_depth(c) > 0] or [TOP])
    report = FmpReport(max_worlds)
    for n in range(1, max_worlds + 1):
        names = tuple(f"w{i}" for i in range(n))
        partitions = list(all_partitions(n))
        perms = [(0,) + p for p in permutations(range(1, n))]
        count = 0
        for pa, pb in product(partitions, partitions):
            for vx, vy in product(range(1 << n), repeat=2):
                if not _canonical(n, pa, pb, vx, vy, perms):
                    continue
                blocks = {"a": tuple(pa), "b": tuple(pb)}
                m = Model(names, ("a", "b"), blocks, {"x": vx, "y": vy}, 0)
                count += 1
                if not Checker(m).holds(0, head):
                    continue
                full = (1 << n) - 1
                classes = [c for c in (vx & vy, vx & ~vy & full, ~vx & vy & full, ~vx & ~vy & full) if c]
                for part in refining_partitions(n, classes):
                    zs = {f"z{j}": b for j, b in enumerate(part)}
                    mz = Model(names, ("a", "b"), blocks, {"x": vx, "y": vy, **zs}, 0)
                    count += 1
                    if Checker(mz).holds(0, tail):
                        report.examined += count
                        report.per_size[n] = count
                        report.outcome, report.counterexample = "counterexample", mz
                        return report
        report.per_size[n] = count
        report.examined += count
    return report
