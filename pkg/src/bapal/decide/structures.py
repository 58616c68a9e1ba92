"""Maximal sets, pseudo-models, hue bookkeeping and the clause validator."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from ..kripke import Model, bits, mask_of
from ..syntax import (And, Atom, ClosureTable, Formula, Know, Not, closure, hue_names, parse,
                      strip_double_negations, to_text)


def decision_table(f: Formula) -> ClosureTable:
    """Closure of an AANF formula; hue atoms are chosen per pseudo-model, not here."""
    return closure(strip_double_negations(f), hue_budget=0)


@dataclass(frozen=True)
class MaximalSet:
    colour: frozenset[Formula]  # the non-negated closure formulas in the set
    hue: frozenset[str]  # hue atoms in the set; every other hue atom occurs negated

    def __contains__(self, f: Formula) -> bool:
        if isinstance(f, Not):
            return not self.__contains__(f.f)
        if isinstance(f, Atom) and f.name in self.hue:
            return True
        return f in self.colour

    def members(self, table: ClosureTable) -> list[Formula]:
        return [g for g in table.cl if g in self]

    def col_atoms(self) -> frozenset[str]:
        return frozenset(g.name for g in self.colour if isinstance(g, Atom))

    def sort_key(self):
        return (tuple(sorted(to_text(g) for g in self.colour)), tuple(sorted(self.hue)))


class HueAtlas:
    """Hue atom denotations with a reverse index from denotation to its first atom."""

    def __init__(self, names: Sequence[str], states: Sequence[MaximalSet]):
        self.names = tuple(names)
        self.denotation = {h: mask_of(i for i, s in enumerate(states) if h in s.hue) for h in names}
        self.canonical: dict[int, str] = {}
        for h in self.names:
            self.canonical.setdefault(self.denotation[h], h)

    def family(self) -> list[int]:
        return sorted(self.canonical)

    def atom_for(self, mask: int) -> Optional[str]:
        return self.canonical.get(mask)

    def __len__(self):
        return len(self.names)


@dataclass(frozen=True, eq=False)
class PseudoModel:
    table: ClosureTable
    states: tuple[MaximalSet, ...]
    relations: Mapping[str, tuple[int, ...]]  # agent -> partition blocks over state indices
    hue_atoms: tuple[str, ...]
    names: tuple[str, ...] = ()
    agents: tuple[str, ...] = ()
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(f"s{i}" for i in range(len(self.states))))
        if not self.agents:
            object.__setattr__(self, "agents", tuple(sorted(self.relations)))

    @property
    def root(self) -> Formula:
        return self.table.root

    @property
    def col_atoms(self) -> tuple[str, ...]:
        return tuple(sorted(self.table.atoms_col))

    @property
    def full(self) -> int:
        return (1 << len(self.states)) - 1

    def atlas(self) -> HueAtlas:
        a = self.__dict__.get("_atlas")
        if a is None:
            a = HueAtlas(self.hue_atoms, self.states)
            object.__setattr__(self, "_atlas", a)
        return a

    def to_model(self) -> Model:
        """The pseudo-model read as a Kripke model over colour and hue atoms."""
        m = self.__dict__.get("_model")
        if m is None:
            val = {}
            for p in self.col_atoms:
                val[p] = mask_of(i for i, s in enumerate(self.states) if Atom(p) in s.colour)
            val.update(self.atlas().denotation)
            m = Model(self.names, self.agents, dict(self.relations), val)
            object.__setattr__(self, "_model", m)
        return m

    def key(self):
        return (tuple(self.states), tuple(sorted(self.relations.items())), self.hue_atoms)

    def mask(self, f: Formula) -> int:
        return mask_of(i for i, s in enumerate(self.states) if f in s)

    def index(self, state) -> int:
        if isinstance(state, int):
            return state
        if isinstance(state, str):
            return self.names.index(state)
        return self.states.index(state)


def pseudo_model(table: ClosureTable, states: Sequence[MaximalSet],
                 relations: Mapping[str, Iterable[int]], hue_atoms: Sequence[str],
                 names: Sequence[str] = (), agents: Sequence[str] = (), metadata=None) -> PseudoModel:
    return PseudoModel(table, tuple(states), {a: tuple(b) for a, b in relations.items()},
                       tuple(hue_atoms), tuple(names), tuple(agents), dict(metadata or {}))


# -- validation ------------------------------------------------------------

@dataclass(frozen=True)
class ClauseResult:
    ok: bool
    detail: str = ""
    state: Optional[str] = None


CLAUSES = ("1", "2", "3", "4", "5", "6")


def col_class_masks(pm: PseudoModel, within: Optional[int] = None) -> list[int]:
    within = pm.full if within is None else within
    groups: dict[frozenset, int] = {}
    for i in bits(within):
        groups[pm.states[i].col_atoms()] = groups.get(pm.states[i].col_atoms(), 0) | 1 << i
    return sorted(groups.values(), key=lambda b: b & -b)


def unions(masks: Sequence[int]) -> list[int]:
    out = []
    for sel in range(1 << len(masks)):
        u = 0
        for i in bits(sel):
            u |= masks[i]
        out.append(u)
    return out


def _is_maximal(s: MaximalSet, table: ClosureTable) -> Optional[str]:
    base = set(table.base)
    stray = [g for g in s.colour if g not in base]
    if stray:
        return f"{to_text(stray[0])} is not a closure formula"
    for g in table.base:
        if isinstance(g, And) and (g in s) != (g.l in s and g.r in s):
            return f"conjunction clause fails for {to_text(g)}"
        if isinstance(g, Know) and g in s and g.f not in s:
            return f"{to_text(g)} present without {to_text(g.f)}"
    return None


def validate(pm: PseudoModel) -> dict[str, ClauseResult]:
    """Check each pseudo-model clause separately, reporting a failing state."""
    res: dict[str, ClauseResult] = {}
    table = pm.table
    hue = set(pm.hue_atoms)

    bad = None
    if len(set(pm.states)) != len(pm.states):
        bad = ClauseResult(False, "two states are the same maximal set")
    for i, s in enumerate(pm.states):
        if bad:
            break
        why = _is_maximal(s, table)
        if why is None and not s.hue <= hue:
            why = "hue mentions an undeclared atom"
        if why:
            bad = ClauseResult(False, why, pm.names[i])
    res["1"] = bad or ClauseResult(True)

    kforms = {a: [g for g in table.base if isinstance(g, Know) and g.agent == a] for a in pm.agents}
    bad = None
    for a in pm.agents:
        seen = 0
        for b in pm.relations.get(a, ()):
            if b & seen:
                bad = ClauseResult(False, f"relation {a} is not a partition")
            seen |= b
            members = list(bits(b))
            for g in kforms[a]:
                if len({g in pm.states[i] for i in members}) > 1:
                    bad = bad or ClauseResult(False, f"{a}-class disagrees on {to_text(g)}",
                                              pm.names[members[0]])
        if seen != pm.full:
            bad = bad or ClauseResult(False, f"relation {a} does not cover every state")
    res["2"] = bad or ClauseResult(True)

    bad = None
    model = pm.to_model()
    for i, s in enumerate(pm.states):
        for g in table.base:
            if isinstance(g, Know) and g not in s:
                cell = model.cell(g.agent, i)
                if not any(g.f not in pm.states[j] for j in bits(cell)):
                    bad = ClauseResult(False, f"no {g.agent}-successor refutes {to_text(g.f)}",
                                       pm.names[i])
                    break
        if bad:
            break
    res["3"] = bad or ClauseResult(True)

    bad = None
    for p in pm.col_atoms:
        if model.val(p) != pm.mask(Atom(p)):
            bad = ClauseResult(False, f"valuation of {p} differs from membership")
    for h in pm.hue_atoms:
        if model.val(h) != mask_of(i for i, s in enumerate(pm.states) if h in s.hue):
            bad = ClauseResult(False, f"valuation of {h} differs from membership")
    extra = set(model.stored_atoms()) - set(pm.col_atoms) - hue
    if extra:
        bad = ClauseResult(False, f"atoms outside colour and hue are true: {sorted(extra)}")
    res["4"] = bad or ClauseResult(True)

    atlas = pm.atlas()
    bad = None
    for u in unions(col_class_masks(pm)):
        if atlas.atom_for(u) is None:
            bad = ClauseResult(False, "no hue atom for the colour-definable set "
                               + "{" + ",".join(pm.names[i] for i in bits(u)) + "}")
            break
    res["5"] = bad or ClauseResult(True)

    bad = None
    fam = atlas.family()
    for x, y in combinations(fam, 2):
        if atlas.atom_for(x | y) is None or atlas.atom_for(x & y) is None:
            bad = ClauseResult(False, "hue denotations not closed under union and intersection")
            break
    res["6"] = bad or ClauseResult(True)
    return res


def is_pseudo_model(pm: PseudoModel) -> bool:
    return all(r.ok for r in validate(pm).values())


# -- canonical hue assignment ----------------------------------------------

def with_canonical_hue(table: ClosureTable, colours: Sequence[frozenset[Formula]],
                       relations: Mapping[str, Iterable[int]], names: Sequence[str] = (),
                       agents: Sequence[str] = (), metadata=None) -> PseudoModel:
    """Pseudo-model over distinct colours whose hue atoms denote every colour-definable set.

    That family is already closed under union and intersection.
    """
    colours = list(colours)
    groups: dict[frozenset, int] = {}
    for i, c in enumerate(colours):
        key = frozenset(g.name for g in c if isinstance(g, Atom))
        groups[key] = groups.get(key, 0) | 1 << i
    classes = sorted(groups.values(), key=lambda b: b & -b)
    fam = unions(classes)
    hnames = hue_names(len(fam), table.atoms_col)
    states = tuple(MaximalSet(c, frozenset(h for h, u in zip(hnames, fam) if u >> i & 1))
                   for i, c in enumerate(colours))
    return pseudo_model(table, states, relations, hnames, names, agents, metadata)


def agreement_blocks(pm_states: Sequence[MaximalSet], table: ClosureTable, agent: str,
                     within: Optional[Iterable[int]] = None) -> list[int]:
    """Partition of states by agreement on the agent's knowledge formulas."""
    kf = [g for g in table.base if isinstance(g, Know) and g.agent == agent]
    idx = range(len(pm_states)) if within is None else within
    groups: dict[tuple, int] = {}
    for i in idx:
        key = tuple(g in pm_states[i] for g in kf)
        groups[key] = groups.get(key, 0) | 1 << i
    return sorted(groups.values(), key=lambda b: b & -b)


# -- serialization ---------------------------------------------------------

def to_json(pm: PseudoModel) -> dict:
    m = pm.to_model()
    return {
        "formula": to_text(pm.root),
        "agents": list(pm.agents),
        "worlds": list(pm.names),
        "relations": {a: [[pm.names[i] for i in bits(b)] for b in pm.relations[a]] for a in pm.agents},
        "valuation": {p: [pm.names[i] for i in bits(v)] for p, v in sorted(m.valuation.items()) if v},
        "hue_atoms": list(pm.hue_atoms),
        "states": {pm.names[i]: {"colour": sorted(to_text(g) for g in s.colour),
                                 "hue": sorted(s.hue)} for i, s in enumerate(pm.states)},
        **({"metadata": dict(pm.metadata)} if pm.metadata else {}),
    }


def from_json(data: Mapping) -> PseudoModel:
    table = decision_table(parse(data["formula"]))
    names = list(data["worlds"])
    states = []
    for n in names:
        entry = data["states"][n]
        colour = frozenset(strip_double_negations(parse(t)) for t in entry["colour"])
        states.append(MaximalSet(colour, frozenset(entry["hue"])))
    idx = {n: i for i, n in enumerate(names)}
    rel = {a: tuple(mask_of(idx[w] for w in blk) for blk in blks)
           for a, blks in data.get("relations", {}).items()}
    return pseudo_model(table, states, rel, data.get("hue_atoms", ()), names,
                        data.get("agents", sorted(rel)), data.get("metadata"))
