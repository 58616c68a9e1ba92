"""Enumeration of maximal-set colours and the elimination skeleton."""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Optional

from ..syntax import And, Ann, Atom, ClosureTable, Formula, Know, Not, atoms, is_boolean
from .budget import Tracker
from .structures import MaximalSet


def _value(f: Formula, true: set) -> bool:
    if isinstance(f, Not):
        return not _value(f.f, true)
    return f in true


@lru_cache(maxsize=None)
def _tautology(f: Formula) -> bool:
    if not is_boolean(f):
        return False
    names = sorted(atoms(f))
    for row in product((False, True), repeat=len(names)):
        true = {Atom(p) for p, v in zip(names, row) if v}
        if not _eval(f, true):
            return False
    return True


def _eval(f: Formula, true: set) -> bool:
    if isinstance(f, Not):
        return not _eval(f.f, true)
    if isinstance(f, And):
        return _eval(f.l, true) and _eval(f.r, true)
    return f in true


def colours(table: ClosureTable, box_rules: bool = False,
            tracker: Optional[Tracker] = None) -> Iterator[frozenset[Formula]]:
    """Colours of maximal sets: subsets of the base closure formulas obeying the three clauses.

    Base formulas are visited subformulas-first, so conjunctions are derived
    and a knowledge formula is only branched on when its body holds.

    ``box_rules`` adds constraints valid in every model, so every colour of a
    phi-image obeys them: an announcement formula holds where its announced
    formula fails; where the announced formula holds and the body is Boolean,
    the announcement formula has the body's value; and under a tautological
    announcement it implies its body.
    """
    base = table.base
    true: set[Formula] = set()

    def rec(i: int):
        if i == len(base):
            if tracker:
                tracker.tick()
            yield frozenset(true)
            return
        g = base[i]
        if isinstance(g, And):
            options = [_value(g.l, true) and _value(g.r, true)]
        elif isinstance(g, Know):
            options = [True, False] if _value(g.f, true) else [False]
        elif isinstance(g, Ann) and box_rules:
            if not _value(g.announced, true):
                options = [True]
            elif is_boolean(g.body.f):
                options = [_value(g.body.f, true)]
            elif _tautology(g.announced) and not _value(g.body.f, true):
                options = [False]
            else:
                options = [True, False]
        else:
            options = [True, False]
        for v in options:
            if v:
                true.add(g)
            yield from rec(i + 1)
            if v:
                true.discard(g)

    yield from rec(0)


def count_colours(table: ClosureTable, box_rules: bool = False) -> int:
    return sum(1 for _ in colours(table, box_rules))


def eliminate(table: ClosureTable, cols: list[frozenset[Formula]], agents) -> list[frozenset[Formula]]:
    """Type elimination: drop colours with an unmet ~K_a psi until nothing changes.

    Two colours are a-related when they agree on every K_a formula.
    """
    kf = {a: [g for g in table.base if isinstance(g, Know) and g.agent == a] for a in agents}
    alive = set(range(len(cols)))
    profile = {a: [tuple(g in c for g in kf[a]) for c in cols] for a in agents}
    changed = True
    while changed:
        changed = False
        groups = {a: {} for a in agents}
        for a in agents:
            for i in alive:
                groups[a].setdefault(profile[a][i], []).append(i)
        for i in sorted(alive):
            c = cols[i]
            for a in agents:
                peers = groups[a][profile[a][i]]
                for g in kf[a]:
                    if g in c:
                        continue
                    if not any(not _value(g.f, cols[j]) for j in peers if j in alive):
                        alive.discard(i)
                        changed = True
                        break
                if i not in alive:
                    break
    return [cols[i] for i in sorted(alive)]


def state(colour: frozenset[Formula], hue=frozenset()) -> MaximalSet:
    return MaximalSet(colour, frozenset(hue))
