"""Bisimilarity checks: full, atom-restricted, depth-bounded and X! (announcement) bisimulation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .kripke import Model, bits, mask_of, restrict


@dataclass(frozen=True)
class BisimWitness:
    kind: str  # full | q_restricted | n_bounded | x_announcement
    pairs: frozenset[tuple[int, int]]
    atoms: Optional[frozenset[str]] = None  # Q or X
    depth: Optional[int] = None
    permutation: Optional[Mapping[str, str]] = None

    def to_json(self, m: Model, n: Model) -> dict:
        out = {
            "kind": self.kind,
            "pairs": sorted([m.names[u], n.names[v]] for u, v in self.pairs),
        }
        if self.atoms is not None:
            out["atoms"] = sorted(self.atoms)
        if self.depth is not None:
            out["depth"] = self.depth
        if self.permutation is not None:
            out["permutation"] = dict(sorted(self.permutation.items()))
        return out


def _refine(m: Model, n: Model, atoms_m: Sequence[str], atoms_n: Sequence[str],
            rounds: Optional[int] = None) -> tuple[list[int], list[int]]:
    """Colour both models' worlds; equal colours mean (rounds-bounded) bisimilar.

    ``atoms_m[i]`` in m is compared with ``atoms_n[i]`` in n.
    """
    agents = sorted(set(m.agents) | set(n.agents))
    worlds = [(m, w) for w in range(m.size)] + [(n, w) for w in range(n.size)]
    offset = m.size

    def init(side, w):
        names = atoms_m if side is m else atoms_n
        return tuple(side.val(p) >> w & 1 for p in names)

    colour = _normalize([init(side, w) for side, w in worlds])
    r = 0
    while rounds is None or r < rounds:
        sig = []
        for i, (side, w) in enumerate(worlds):
            base = 0 if side is m else offset
            succ = tuple(frozenset(colour[base + v] for v in bits(side.cell(a, w))) for a in agents)
            sig.append((colour[i], succ))
        new = _normalize(sig)
        r += 1
        if max(new, default=-1) == max(colour, default=-1):
            colour = new
            break
        colour = new
    return colour[:offset], colour[offset:]


def _normalize(keys: list) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def _witness(kind, cm, cn, **extra) -> BisimWitness:
    pairs = frozenset((u, v) for u in range(len(cm)) for v in range(len(cn)) if cm[u] == cn[v])
    return BisimWitness(kind, pairs, **extra)


def shared_atoms(m: Model, n: Model) -> list[str]:
    return sorted(set(m.stored_atoms()) | set(n.stored_atoms()))


def bisimilar(m: Model, s, n: Model, t) -> Optional[BisimWitness]:
    """Greatest bisimulation between m and n if it relates s and t."""
    s, t = m.world(s), n.world(t)
    names = shared_atoms(m, n)
    cm, cn = _refine(m, n, names, names)
    if cm[s] != cn[t]:
        return None
    return _witness("full", cm, cn)


def q_bisimilar(Q: Iterable[str], m: Model, s, n: Model, t) -> Optional[BisimWitness]:
    s, t = m.world(s), n.world(t)
    Q = sorted(set(Q))
    cm, cn = _refine(m, n, Q, Q)
    if cm[s] != cn[t]:
        return None
    return _witness("q_restricted", cm, cn, atoms=frozenset(Q))


def n_bisimilar(depth: int, m: Model, s, n: Model, t) -> bool:
    s, t = m.world(s), n.world(t)
    names = shared_atoms(m, n)
    cm, cn = _refine(m, n, names, names, rounds=depth)
    return cm[s] == cn[t]


def component(m: Model, w: int) -> int:
    """Worlds reachable from w along any agent's relation."""
    seen = 1 << w
    frontier = seen
    while frontier:
        nxt = 0
        for u in bits(frontier):
            for a in m.agents:
                nxt |= m.cell(a, u)
        frontier = nxt & ~seen
        seen |= nxt
    return seen


def x_announcement_bisimilar(X: Iterable[str], m: Model, s, n: Model, t) -> Optional[BisimWitness]:
    """Search for an X!-bisimulation relating s and t.

    Only the connected components of s and t matter.  Every world there is
    related to some world on the other side, so the permutation must map the
    atoms outside X that are true somewhere in the first component exactly
    onto those true somewhere in the second.  Atoms false on both sides are
    swapped among themselves, which any extension of the partial map allows.
    Candidate maps are explored in lexicographic order; a partial map is
    abandoned as soon as the atoms fixed so far already separate s from t.
    """
    X = frozenset(X)
    s, t = m.world(s), n.world(t)
    cm_mask, cn_mask = component(m, s), component(n, t)
    mc, nc = restrict(m, cm_mask), restrict(n, cn_mask)
    s2 = sorted(bits(cm_mask)).index(s)
    t2 = sorted(bits(cn_mask)).index(t)
    xs = sorted(X & (set(mc.stored_atoms()) | set(nc.stored_atoms())))
    free_m = [p for p in mc.stored_atoms() if p not in X]
    free_n = [p for p in nc.stored_atoms() if p not in X]
    if len(free_m) != len(free_n):
        return None

    def ok(assigned: list[tuple[str, str]]) -> Optional[tuple[list[int], list[int]]]:
        am = xs + [a for a, _ in assigned]
        an = xs + [b for _, b in assigned]
        cm, cn = _refine(mc, nc, am, an)
        return (cm, cn) if cm[s2] == cn[t2] else None

    if ok([]) is None:
        return None

    def search(i: int, used: frozenset, assigned: list) -> Optional[tuple]:
        if i == len(free_m):
            res = ok(assigned)
            return (list(assigned), res) if res else None
        for cand in free_n:
            if cand in used:
                continue
            assigned.append((free_m[i], cand))
            if ok(assigned) is not None:
                found = search(i + 1, used | {cand}, assigned)
                if found:
                    return found
            assigned.pop()
        return None

    found = search(0, frozenset(), [])
    if not found:
        return None
    assigned, (cm, cn) = found
    om = sorted(bits(cm_mask))
    on = sorted(bits(cn_mask))
    pairs = frozenset((om[u], on[v]) for u in range(len(cm)) for v in range(len(cn)) if cm[u] == cn[v])
    return BisimWitness("x_announcement", pairs, atoms=X, permutation=dict(assigned))


def rename_atoms(m: Model, mapping: Mapping[str, str]) -> Model:
    """Apply an injective renaming to the stored atoms."""
    targets = [mapping.get(p, p) for p in m.valuation]
    if len(set(targets)) != len(targets):
        raise ValueError("renaming is not injective on the stored atoms")
    val = {mapping.get(p, p): v for p, v in m.valuation.items()}
    return Model(m.names, m.agents, m.blocks, val, m.designated, dict(m.metadata))


def quotient(m: Model, atom_names: Optional[Sequence[str]] = None) -> tuple[Model, list[int]]:
    """Bisimulation quotient of m (over the given atoms) and the world-to-class map."""
    names = list(m.stored_atoms()) if atom_names is None else list(atom_names)
    col, _ = _refine(m, m, names, names)
    k = max(col) + 1
    reps = [None] * k
    for w, c in enumerate(col):
        if reps[c] is None:
            reps[c] = w
    blocks = {}
    for a in m.agents:
        seen, out = set(), []
        for w in reps:
            cls = frozenset(col[v] for v in bits(m.cell(a, w)))
            if cls not in seen:
                seen.add(cls)
                out.append(mask_of(cls))
        blocks[a] = tuple(out)
    val = {p: mask_of(c for c in range(k) if m.val(p) >> reps[c] & 1) for p in m.valuation}
    d = col[m.designated] if m.designated is not None else None
    q = Model(tuple(m.names[w] for w in reps), m.agents, blocks, val, d, dict(m.metadata))
    return q, col
