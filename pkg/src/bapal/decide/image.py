"""Pseudo-models read off genuine models, and models built from pseudo-models."""
from __future__ import annotations

from typing import Optional

from ..bisim import quotient
from ..kripke import Checker, Model, bits, class_masks, mask_of
from ..syntax import Formula, NotAANFError, hue_names, is_aanf, strip_double_negations, to_text
from .budget import Tracker
from .structures import MaximalSet, PseudoModel, decision_table, pseudo_model, unions


def phi_image(m: Model, f: Formula, tracker: Optional[Tracker] = None) -> PseudoModel:
    """The f-image of m.

    m is first reduced to its bisimulation quotient.  A state is the pair of a
    world's colour (the closure formulas true there) and its valuation class;
    two worlds agreeing on both collapse.  Hue atoms name every
    Boolean-definable set of worlds, that is every union of valuation classes.
    Relations are the equivalences induced by the model's relations.

    ``metadata["world_map"]`` sends each world of m to its state.
    """
    if not is_aanf(f):
        raise NotAANFError(f"not in announcement normal form: {to_text(f)}")
    g = strip_double_negations(f)
    table = decision_table(g)
    q, to_q = quotient(m)
    chk = Checker(q)
    truth = {b: chk.ext(b) for b in table.base}
    classes = class_masks(q)
    if tracker:
        tracker.check_hue(1 << len(classes))
    cls_of = {}
    for ci, c in enumerate(classes):
        for w in bits(c):
            cls_of[w] = ci

    keys: dict[tuple, int] = {}
    state_of = []
    for w in range(q.size):
        colour = frozenset(b for b, v in truth.items() if v >> w & 1)
        state_of.append(keys.setdefault((colour, cls_of[w]), len(keys)))
    order = list(keys)
    hue_sets = unions([mask_of(i for i, (_, c) in enumerate(order) if c == ci)
                       for ci in range(len(classes))])
    hnames = hue_names(len(hue_sets), table.atoms_col)
    states = [MaximalSet(col, frozenset(h for h, u in zip(hnames, hue_sets) if u >> i & 1))
              for i, (col, _) in enumerate(order)]

    rel = {}
    for a in m.agents:
        groups: list[int] = []
        for b in q.blocks[a]:
            mask = mask_of(state_of[w] for w in bits(b))
            merged = [x for x in groups if x & mask]
            for x in merged:
                groups.remove(x)
                mask |= x
            groups.append(mask)
        rel[a] = tuple(sorted(groups, key=lambda x: x & -x))

    names = [None] * len(states)
    for w in range(q.size):
        if names[state_of[w]] is None:
            names[state_of[w]] = q.names[w]
    world_map = {m.names[w]: names[state_of[to_q[w]]] for w in range(m.size)}
    return pseudo_model(table, states, rel, hnames, names, m.agents,
                        {"world_map": world_map, "source_worlds": m.size})


# -- actualisation ---------------------------------------------------------

def primes(k: int) -> list[int]:
    out: list[int] = []
    c = 2
    while len(out) < k:
        if all(c % p for p in out if p * p <= c):
            out.append(c)
        c += 1
    return out


def deg(prime: int, n: int) -> int:
    """Exponent of the largest power of ``prime`` dividing n."""
    if n <= 0:
        raise ValueError("deg is defined on positive integers")
    i = 0
    while n % prime == 0:
        n //= prime
        i += 1
    return i


def act_atom_name(j: int, i: int, taken=frozenset()) -> str:
    name = f"q{j}_{i}"
    while name in taken:
        name = "q" + name
    return name


def actualise(pm: PseudoModel, copies: int, act_indices: Optional[int] = None) -> Model:
    """Finite truncation of the actualisation: copies 1..``copies`` of every state.

    Act atom ``q{j}_{i}`` (for hue atom number j and index i up to
    ``act_indices``, default ``copies``) holds at (s, n) iff s carries hue
    atom j and the j-th prime divides i and n to the same power.  Hue atoms
    are false everywhere.  The truncation is recorded in the metadata.
    """
    if copies < 1:
        raise ValueError("copies must be at least 1")
    act_indices = copies if act_indices is None else act_indices
    k = len(pm.hue_atoms)
    ps = primes(k)
    S = len(pm.states)
    names = tuple(f"({pm.names[i]},{n})" for n in range(1, copies + 1) for i in range(S))

    def world(i, n):
        return (n - 1) * S + i

    blocks = {}
    for a in pm.agents:
        blocks[a] = tuple(mask_of(world(i, n) for i in bits(b) for n in range(1, copies + 1))
                          for b in pm.relations[a])
    val: dict[str, int] = {}
    for p in pm.col_atoms:
        v = pm.to_model().val(p)
        mask = mask_of(world(i, n) for i in bits(v) for n in range(1, copies + 1))
        if mask:
            val[p] = mask
    taken = set(pm.col_atoms) | set(pm.hue_atoms)
    den = pm.atlas().denotation
    for j, h in enumerate(pm.hue_atoms):
        for i in range(1, act_indices + 1):
            di = deg(ps[j], i)
            mask = mask_of(world(s, n) for s in bits(den[h]) for n in range(1, copies + 1)
                           if deg(ps[j], n) == di)
            if mask:
                val[act_atom_name(j, i, taken)] = mask
    meta = {"copies": copies, "act_indices": act_indices, "truncated": True,
            "hue_atoms": list(pm.hue_atoms), "primes": ps}
    return Model(names, pm.agents, blocks, val, None, meta)


def copy_world(pm: PseudoModel, state, n: int) -> int:
    """Index of (state, n) in an actualisation of pm."""
    return (n - 1) * len(pm.states) + pm.index(state)
