"""Syntactic restrictions, witnesses and n-consistency.

Reading a pseudo-model as a Kripke model over colour and hue atoms, and
letting the Boolean quantifier range over the hue denotations, gives the
"hue semantics" used here.  It is invariant under bisimulation (hue atoms
included).  In an (n-1)-consistent pseudo-model the colour of every state
agrees with hue semantics on formulas of quantifier depth below n, so a
witness for psi exists only if psi holds at the state in the restriction
under hue semantics.  When it does, the restriction recoloured by hue
semantics is the natural witness; it is built and verified explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..bisim import bisimilar, quotient
from ..kripke import Checker, bits, mask_of
from ..syntax import And, Ann, Atom, Formula, Know, Not, quantifier_depth, to_text
from .budget import ResourceExhausted, Tracker
from .structures import MaximalSet, PseudoModel, pseudo_model, validate


class EmptyRestriction(ValueError):
    pass


def hue_checker(pm: PseudoModel) -> Checker:
    c = pm.__dict__.get("_hue_checker")
    if c is None:
        c = Checker(pm.to_model(), box_family=pm.atlas().family())
        object.__setattr__(pm, "_hue_checker", c)
    return c


def hue_truth(pm: PseudoModel, f: Formula) -> int:
    """States where f holds under hue semantics, as a mask."""
    return hue_checker(pm).ext(f)


def restrict_states(pm: PseudoModel, keep: int) -> tuple[PseudoModel, dict[int, int]]:
    if not keep:
        raise EmptyRestriction("restriction keeps no state")
    order = list(bits(keep))
    pos = {w: i for i, w in enumerate(order)}
    rel = {}
    for a in pm.agents:
        out = []
        for b in pm.relations[a]:
            nb = mask_of(pos[w] for w in bits(b & keep))
            if nb:
                out.append(nb)
        rel[a] = tuple(out)
    r = pseudo_model(pm.table, [pm.states[w] for w in order], rel, pm.hue_atoms,
                     [pm.names[w] for w in order], pm.agents)
    return r, pos


def restriction_mask(pm: PseudoModel, alpha: Formula, p: str) -> int:
    return pm.mask(alpha) & pm.atlas().denotation[p]


def syntactic_restriction(pm: PseudoModel, alpha: Formula, p: str) -> PseudoModel:
    """States containing both alpha and the hue atom p; not re-validated."""
    if not pm.atlas().denotation.get(p):
        raise EmptyRestriction(f"hue atom {p} has empty denotation")
    return restrict_states(pm, restriction_mask(pm, alpha, p))[0]


# -- witness candidates ----------------------------------------------------

def _merge(pm: PseudoModel, new_states: list[MaximalSet]) -> tuple[PseudoModel, list[int]]:
    """Collapse equal maximal sets; relations become the induced equivalences."""
    index: dict[MaximalSet, int] = {}
    image = []
    for s in new_states:
        image.append(index.setdefault(s, len(index)))
    states = list(index)
    names = [None] * len(states)
    for i, j in enumerate(image):
        if names[j] is None:
            names[j] = pm.names[i]
    rel = {}
    for a in pm.agents:
        parent = list(range(len(states)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for b in pm.relations[a]:
            ws = [image[w] for w in bits(b)]
            for w in ws[1:]:
                parent[find(w)] = find(ws[0])
        groups: dict[int, int] = {}
        for x in range(len(states)):
            groups[find(x)] = groups.get(find(x), 0) | 1 << x
        rel[a] = tuple(sorted(groups.values(), key=lambda m: m & -m))
    return pseudo_model(pm.table, states, rel, pm.hue_atoms, names, pm.agents), image


def truthful(pm: PseudoModel) -> tuple[PseudoModel, list[int]]:
    """Recolour every state by hue semantics, merging states that become equal."""
    masks = {g: hue_truth(pm, g) for g in pm.table.base}
    new = [MaximalSet(frozenset(g for g, m in masks.items() if m >> i & 1), s.hue)
           for i, s in enumerate(pm.states)]
    return _merge(pm, new)


def mixed(pm: PseudoModel, n: int) -> tuple[PseudoModel, list[int]]:
    """Hue semantics below quantifier depth n, original colour bits above it."""
    masks = {g: hue_truth(pm, g) for g in pm.table.base}
    new = []
    for i, s in enumerate(pm.states):
        true: set[Formula] = set()

        def val(f):
            return (not val(f.f)) if isinstance(f, Not) else f in true

        for g in pm.table.base:
            if quantifier_depth(g) < n or isinstance(g, Atom):
                v = bool(masks[g] >> i & 1)
            elif isinstance(g, And):
                v = val(g.l) and val(g.r)
            elif isinstance(g, Know):
                v = g in s.colour and val(g.f)
            else:
                v = g in s.colour
            if v:
                true.add(g)
        new.append(MaximalSet(frozenset(true), s.hue))
    return _merge(pm, new)


def tagged(pm: PseudoModel, n: int) -> Optional[tuple[PseudoModel, list[int]]]:
    """Hue semantics below depth n; announcement formulas of depth n and above act as tags.

    Recolouring can make two non-bisimilar states the same maximal set.  The
    (n-1)-consistency check never inspects announcement formulas of depth n
    or more, so their bits are free: each bisimulation class sharing a
    hue-truthful signature gets its own bit vector, and knowledge formulas
    over tagged bodies are evaluated through the relations.
    """
    model = pm.to_model()
    _, cls = quotient(model)
    masks = {g: hue_truth(pm, g) for g in pm.table.base}
    free = [g for g in pm.table.base if isinstance(g, Ann) and quantifier_depth(g) >= n]
    low = [g for g in pm.table.base if quantifier_depth(g) < n]

    by_sig: dict[tuple, list[int]] = {}
    for i, s in enumerate(pm.states):
        sig = (frozenset(g for g in low if masks[g] >> i & 1), s.hue)
        group = by_sig.setdefault(sig, [])
        if cls[i] not in group:
            group.append(cls[i])
    tag = {}
    for group in by_sig.values():
        if len(group) > 1 << len(free):
            return None
        for j, c in enumerate(group):
            tag[c] = j

    truth: dict[Formula, int] = {}

    def value(f: Formula) -> int:
        if isinstance(f, Not):
            return pm.full & ~value(f.f)
        return truth[f]

    for g in pm.table.base:
        if quantifier_depth(g) < n:
            truth[g] = masks[g]
        elif isinstance(g, And):
            truth[g] = value(g.l) & value(g.r)
        elif isinstance(g, Know):
            body = value(g.f)
            truth[g] = mask_of(i for i in range(len(pm.states))
                               if model.cell(g.agent, i) & ~body == 0)
        else:
            k = free.index(g)
            truth[g] = mask_of(i for i in range(len(pm.states)) if tag[cls[i]] >> k & 1)
    new = [MaximalSet(frozenset(g for g, m in truth.items() if m >> i & 1), s.hue)
           for i, s in enumerate(pm.states)]
    return _merge(pm, new)


@dataclass
class Context:
    tracker: Tracker = field(default_factory=Tracker)
    witnesses: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    last_failure: Optional[str] = None


_BUILDERS = (
    ("restriction", lambda r, n: (r, list(range(len(r.states))))),
    ("truthful", lambda r, n: truthful(r)),
    ("mixed", mixed),
    ("tagged", tagged),
)


def _candidate(r: PseudoModel, n: int, k: int, ctx: Context):
    """The k-th candidate for r if it verifies: a pseudo-model, bisimilar to r state by
    state, and (n-1)-consistent.  None otherwise."""
    key = (r.key(), n, k)
    if key in ctx.witnesses:
        return ctx.witnesses[key]
    ctx.tracker.tick()
    built = _BUILDERS[k][1](r, n)
    result = None
    if built is None:
        ctx.witnesses[key] = None
        return None
    cand, image = built
    if all(c.ok for c in validate(cand).values()):
        cm, rm = cand.to_model(), r.to_model()
        if (all(bisimilar(cm, image[i], rm, i) for i in range(len(r.states)))
                and consistent(cand, n - 1, ctx)):
            result = (cand, image)
    ctx.witnesses[key] = result
    return result


def find_witness(pm: PseudoModel, sigma, alpha: Formula, p: str, psi: Formula, n: int,
                 ctx: Optional[Context] = None) -> Optional[tuple[PseudoModel, int]]:
    """An alpha-p witness for psi at sigma whose pseudo-model is (n-1)-consistent.

    Candidates are the restriction itself, its recolouring by hue semantics,
    a mix keeping colour bits of depth n and above, and a tagged recolouring
    that keeps non-bisimilar states apart.  Absence is decided
    through hue semantics (see module docstring).  If hue semantics says a
    witness should exist but no candidate verifies, the search raises
    :class:`ResourceExhausted` rather than answer.
    """
    ctx = ctx or Context()
    sigma = pm.index(sigma)
    keep = restriction_mask(pm, alpha, p)
    if not keep >> sigma & 1:
        raise ValueError("alpha and p must both belong to sigma")
    r, pos = restrict_states(pm, keep)
    s2 = pos[sigma]
    for k in range(len(_BUILDERS)):
        built = _candidate(r, n, k, ctx)
        if built is not None:
            cand, image = built
            if psi in cand.states[image[s2]]:
                return cand, image[s2]
    if not hue_truth(r, psi) >> s2 & 1:
        return None
    raise ResourceExhausted(
        "witness", f"no verified witness for {to_text(psi)} at {pm.names[sigma]} under ({to_text(alpha)}, {p})")


def consistent(pm: PseudoModel, n: int, ctx: Optional[Context] = None) -> bool:
    """n-consistency, checked literally from the definition with memoization."""
    ctx = ctx or Context()
    if n <= 0:
        return True
    key = (pm.key(), n)
    if key in ctx.verdicts:
        return ctx.verdicts[key]
    ok = consistent(pm, n - 1, ctx) and _level(pm, n, ctx)
    ctx.verdicts[key] = ok
    return ok


def _level(pm: PseudoModel, n: int, ctx: Context) -> bool:
    boxes = [g for g in pm.table.base if isinstance(g, Ann) and quantifier_depth(g) <= n]
    if not boxes:
        return True
    atlas = pm.atlas()
    reps = [(atlas.canonical[m], m) for m in atlas.family() if m]
    for i, s in enumerate(pm.states):
        for box in boxes:
            alpha, psi = box.announced, box.body.f
            if alpha in s:
                all_ok = True
                for p, den in reps:
                    if den >> i & 1 and find_witness(pm, i, alpha, p, psi, n, ctx) is None:
                        all_ok = False
                        break
            else:
                all_ok = True
            if (box in s) != all_ok:
                ctx.last_failure = (f"{to_text(box)} {'in' if box in s else 'not in'} "
                                    f"{pm.names[i]} but witnesses {'exist' if all_ok else 'are missing'}")
                return False
    return True
