"""The satisfiability procedure: pruned (type elimination plus model synthesis) and faithful engines."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterator, Optional, Sequence

from ..kripke import Checker, Model, all_models, all_partitions, bits, mask_of
from ..normalform import normalize
from ..syntax import (Atom, Formula, Know, agents as agents_of, atoms as atoms_of,
                      fresh_count_expr, modal_depth, quantifier_depth, to_text)
from .budget import Budget, ResourceExhausted, Tracker
from .colours import _value, colours, eliminate
from .consistency import Context, consistent
from .image import phi_image
from .structures import (MaximalSet, PseudoModel, agreement_blocks, decision_table,
                         to_json as pm_to_json, validate, with_canonical_hue)

ENGINES = ("pruned", "faithful")


@dataclass
class SatVerdict:
    outcome: str  # sat | unsat | resource_exhausted
    engine: str
    budget: Budget
    witness: Optional[PseudoModel] = None
    state: Optional[str] = None
    dimension: Optional[str] = None
    detail: str = ""
    metadata: dict = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.outcome == "sat"

    def to_json(self) -> dict:
        out = {"outcome": self.outcome, "engine": self.engine, "budget": self.budget.to_json(),
               "witness": None, "metadata": dict(self.metadata)}
        if self.witness is not None:
            out["witness"] = {**pm_to_json(self.witness), "state": self.state}
        if self.outcome == "resource_exhausted":
            out["exhausted"] = {"dimension": self.dimension, "detail": self.detail}
        return out


def satisfiable(f: Formula, budget: Optional[Budget] = None, engine: str = "pruned") -> SatVerdict:
    """Decide f.  ``sat`` carries a consistent pseudo-model with f in the named state.

    Exhausting any budget dimension gives ``resource_exhausted``, never ``unsat``.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    budget = budget or Budget()
    tracker = Tracker(budget)
    g = normalize(f)
    run = _pruned if engine == "pruned" else _faithful
    try:
        v = run(g, tracker)
    except ResourceExhausted as e:
        v = SatVerdict("resource_exhausted", engine, budget, dimension=e.dimension, detail=e.detail)
    v.engine, v.budget = engine, budget
    v.metadata.setdefault("normal_form", to_text(g))
    v.metadata.setdefault("quantifier_depth", quantifier_depth(g))
    if v.witness is not None:
        v.metadata["hue_atoms"] = len(v.witness.hue_atoms)
        v.metadata["literal_hue_atoms"] = fresh_count_expr(len(v.witness.table.cl), quantifier_depth(g))
    return v


# -- pruned engine -----------------------------------------------------------

def _agents(g: Formula) -> tuple[str, ...]:
    return tuple(sorted(agents_of(g))) or ("a",)


def _closed_selection(table, cols: list, agents, start: int) -> list[int]:
    """Greedily add colours meeting every unmet ~K_a psi, starting from cols[start]."""
    kf = {a: [k for k in table.base if isinstance(k, Know) and k.agent == a] for a in agents}

    def profile(a, c):
        return tuple(k in c for k in kf[a])

    chosen = [start]
    todo = [start]
    while todo:
        i = todo.pop()
        for a in agents:
            for k in kf[a]:
                if k in cols[i]:
                    continue
                pool = [j for j in range(len(cols)) if profile(a, cols[j]) == profile(a, cols[i])
                        and not _value(k.f, cols[j])]
                if any(j in chosen for j in pool):
                    continue
                chosen.append(pool[0])  # nonempty: survivors are closed under elimination
                todo.append(pool[0])
    return sorted(chosen)


def _skeleton(table, cols: list, agents, names=None, metadata=None) -> PseudoModel:
    rel = {a: agreement_blocks(cols, table, a) for a in agents}
    return with_canonical_hue(table, cols, rel, names or (), agents, metadata)


def _skeleton_model(table, cols: list, agents) -> Model:
    names = tuple(f"c{i}" for i in range(len(cols)))
    val = {p: mask_of(i for i, c in enumerate(cols) if Atom(p) in c) for p in sorted(table.atoms_col)}
    return Model(names, agents, {a: tuple(agreement_blocks(cols, table, a)) for a in agents}, val)


def _pruned(g: Formula, tracker: Tracker) -> SatVerdict:
    table = decision_table(g)
    agents = _agents(g)
    cols = []
    for c in colours(table, box_rules=True, tracker=tracker):
        cols.append(c)
        tracker.check_states(len(cols))
    surv = eliminate(table, cols, agents)
    roots = [i for i, c in enumerate(surv) if g in _as_set(c)]
    meta = {"colours": len(cols), "survivors": len(surv)}
    if not roots:
        return SatVerdict("unsat", "pruned", tracker.budget, metadata=meta)

    D = quantifier_depth(g)
    if D == 0:
        sel = _closed_selection(table, surv, agents, roots[0])
        chosen = [surv[i] for i in sel]
        pm = _skeleton(table, chosen, agents, metadata={"source": "skeleton"})
        if not all(r.ok for r in validate(pm).values()):
            raise AssertionError("skeleton failed validation")
        state = pm.names[chosen.index(surv[roots[0]])]
        return SatVerdict("sat", "pruned", tracker.budget, pm, state, metadata=meta)

    ctx = Context(tracker)
    for source, m in _candidate_models(table, surv, roots, agents, tracker):
        tracker.tick()
        chk = Checker(m)
        hit = chk.ext(g)
        if not hit:
            continue
        pm = phi_image(m, g, tracker)
        if not all(r.ok for r in validate(pm).values()):
            continue
        if consistent(pm, D, ctx):
            w = next(bits(hit))
            state = pm.metadata["world_map"][m.names[w]]
            meta["source"] = source
            return SatVerdict("sat", "pruned", tracker.budget, pm, state, metadata=meta)
    raise ResourceExhausted("models", f"no model with at most {tracker.budget.max_model_worlds} "
                                      "worlds among the candidates satisfies the formula")


def _as_set(c) -> MaximalSet:
    return MaximalSet(c, frozenset())


def _candidate_models(table, surv, roots, agents, tracker) -> Iterator[tuple[str, Model]]:
    for r in roots:
        sel = _closed_selection(table, surv, agents, r)
        yield "skeleton", _skeleton_model(table, [surv[i] for i in sel], agents)
    yield "survivors", _skeleton_model(table, surv, agents)
    atoms = sorted(table.atoms_col)
    for n in range(1, tracker.budget.max_model_worlds + 1):
        for extra in range(n):
            names = atoms + [f"z{j}" for j in range(extra)]
            for m in all_models(n, names, agents):
                tracker.tick()
                # extra atoms only matter if they split a colour-atom class
                if extra and not _extras_split(m, atoms, names[len(atoms):]):
                    continue
                yield f"exhaustive({n})", m


def _extras_split(m: Model, atoms, extras) -> bool:
    base = {}
    for w in range(m.size):
        base.setdefault(frozenset(p for p in atoms if m.val(p) >> w & 1), []).append(w)
    if any(not m.val(z) for z in extras):
        return False
    return any(len({frozenset(z for z in extras if m.val(z) >> w & 1) for w in ws}) > 1
               for ws in base.values())


# -- faithful engine ---------------------------------------------------------

def refinements(block: int) -> Iterator[list[int]]:
    ws = list(bits(block))
    for part in all_partitions(len(ws)):
        yield [mask_of(ws[i] for i in bits(b)) for b in part]


def _faithful(g: Formula, tracker: Tracker) -> SatVerdict:
    """Literal enumeration for quantifier depth 0.

    Every set of distinct colours containing the formula is paired with every
    per-agent partition refining K-agreement, and checked against the clauses.
    Hue atoms are the canonical assignment, which is unique up to renaming.
    """
    if quantifier_depth(g) > 0:
        raise ResourceExhausted("engine", "the faithful engine only runs at quantifier depth 0")
    table = decision_table(g)
    agents = _agents(g)
    cols = []
    for c in colours(table):
        cols.append(c)
        tracker.check_states(len(cols))
    rooted = [i for i, c in enumerate(cols) if g in _as_set(c)]
    examined = 0
    for size in range(1, len(cols) + 1):
        for subset in combinations(range(len(cols)), size):
            tracker.check_time()
            if not any(i in rooted for i in subset):
                continue
            chosen = [cols[i] for i in subset]
            per_agent = []
            for a in agents:
                blocks = agreement_blocks(chosen, table, a)
                per_agent.append([sum(parts, []) for parts in product(*(list(refinements(b)) for b in blocks))])
            for rels in product(*per_agent):
                tracker.tick()
                examined += 1
                pm = with_canonical_hue(table, chosen, dict(zip(agents, rels)), (), agents)
                if all(r.ok for r in validate(pm).values()):
                    root = next(i for i in subset if i in rooted)
                    state = pm.names[subset.index(root)]
                    return SatVerdict("sat", "faithful", tracker.budget, pm, state,
                                      metadata={"colours": len(cols), "examined": examined})
    return SatVerdict("unsat", "faithful", tracker.budget,
                      metadata={"colours": len(cols), "examined": examined})


# -- oracle --------------------------------------------------------------------

def model_search_bound(f: Formula) -> int:
    return 2 ** (modal_depth(f) + 1)


def bounded_model_search(f: Formula, max_worlds: Optional[int] = None,
                         agents: Sequence[str] = ()) -> Optional[tuple[Model, int]]:
    """First (model, world) satisfying f among all models over var(f) up to max_worlds worlds."""
    max_worlds = model_search_bound(f) if max_worlds is None else max_worlds
    names = sorted(atoms_of(f))
    agents = tuple(agents) or _agents(f)
    for n in range(1, max_worlds + 1):
        for m in all_models(n, names, agents):
            hit = Checker(m).ext(f)
            if hit:
                return m, next(bits(hit))
    return None
