"""Finite multi-agent S5 models and the model checker.

Worlds are integers ``0..n-1``; sets of worlds are int bitmasks.  Each agent's
relation is stored as a partition, so reflexivity, symmetry and transitivity
hold by construction.  Atoms missing from the valuation are false everywhere.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .syntax import And, Ann, Atom, Box, Formula, Know, Not, conj


class ModelError(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def mask_of(ws: Iterable[int]) -> int:
    out = 0
    for w in ws:
        out |= 1 << w
    return out


@dataclass(frozen=True, eq=False)
class Model:
    names: tuple[str, ...]
    agents: tuple[str, ...]
    blocks: Mapping[str, tuple[int, ...]]  # agent -> partition blocks as masks
    valuation: Mapping[str, int]  # atom -> mask
    designated: Optional[int] = None
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise ModelError("a model needs at least one world")
        if len(set(self.names)) != n:
            raise ModelError("world names must be distinct")
        full = (1 << n) - 1
        for a in self.agents:
            seen = 0
            for b in self.blocks.get(a, ()):
                if b == 0 or b & seen or b & ~full:
                    raise ModelError(f"relation of agent {a!r} is not a partition")
                seen |= b
            if seen != full:
                raise ModelError(f"relation of agent {a!r} does not cover every world")
        for p, v in self.valuation.items():
            if v & ~full:
                raise ModelError(f"valuation of {p!r} mentions unknown worlds")
        if self.designated is not None and not 0 <= self.designated < n:
            raise ModelError("designated world out of range")
        cls = {}
        for a in self.agents:
            row = [0] * n
            for b in self.blocks[a]:
                for w in bits(b):
                    row[w] = b
            cls[a] = tuple(row)
        object.__setattr__(self, "_cls", cls)

    # -- basic accessors ---------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def full(self) -> int:
        return (1 << len(self.names)) - 1

    def world(self, name_or_index) -> int:
        if isinstance(name_or_index, int):
            if not 0 <= name_or_index < self.size:
                raise ModelError(f"unknown world {name_or_index}")
            return name_or_index
        try:
            return self.names.index(name_or_index)
        except ValueError:
            raise ModelError(f"unknown world {name_or_index!r}") from None

    def cell(self, agent: str, w: int) -> int:
        """The agent's equivalence class of w; agents the model does not declare see only w."""
        row = self._cls.get(agent)
        return row[w] if row is not None else 1 << w

    def val(self, atom: str) -> int:
        return self.valuation.get(atom, 0)

    def stored_atoms(self) -> tuple[str, ...]:
        return tuple(sorted(p for p, v in self.valuation.items() if v))

    def true_atoms(self, w: int) -> frozenset[str]:
        return frozenset(p for p, v in self.valuation.items() if v >> w & 1)

    def with_designated(self, w) -> "Model":
        return Model(self.names, self.agents, self.blocks, self.valuation,
                     self.world(w), self.metadata)

    def __repr__(self):
        return f"Model({self.size} worlds, agents={list(self.agents)}, atoms={list(self.stored_atoms())})"


def make_model(names: Sequence[str], relations: Mapping[str, Iterable[Iterable[str]]],
               valuation: Mapping[str, Iterable[str]], designated: Optional[str] = None,
               agents: Optional[Sequence[str]] = None, metadata=None) -> Model:
    """Build a model from world names; agents without blocks get the identity relation."""
    names = tuple(names)
    index = {n: i for i, n in enumerate(names)}
    try:
        agents = tuple(agents) if agents is not None else tuple(sorted(relations))
        blocks = {}
        for a in agents:
            given = [mask_of(index[w] for w in blk) for blk in relations.get(a, ())]
            covered = 0
            for b in given:
                covered |= b
            given += [1 << w for w in range(len(names)) if not covered >> w & 1]
            blocks[a] = tuple(sorted(given, key=lambda b: (b & -b)))
        val = {p: mask_of(index[w] for w in ws) for p, ws in valuation.items()}
        d = index[designated] if designated is not None else None
    except KeyError as e:
        raise ModelError(f"unknown world {e.args[0]!r}") from None
    return Model(names, agents, blocks, val, d, dict(metadata or {}))


# -- restriction and classes -----------------------------------------------

def restrict(m: Model, keep) -> Model:
    """Submodel on ``keep`` (a mask or an iterable of worlds)."""
    if not isinstance(keep, int):
        keep = mask_of(m.world(w) for w in keep)
    keep &= m.full
    if not keep:
        raise ModelError("restriction to the empty set")
    order = list(bits(keep))
    pos = {w: i for i, w in enumerate(order)}

    def remap(mask):
        return mask_of(pos[w] for w in bits(mask & keep))

    blocks = {a: tuple(b2 for b2 in (remap(b) for b in m.blocks[a]) if b2) for a in m.agents}
    val = {p: remap(v) for p, v in m.valuation.items()}
    d = pos.get(m.designated) if m.designated is not None else None
    return Model(tuple(m.names[w] for w in order), m.agents, blocks, val, d, dict(m.metadata))


@dataclass(frozen=True)
class ValuationClass:
    representative: int
    members: int  # mask


def class_masks(m: Model, within: Optional[int] = None) -> list[int]:
    """Partition of ``within`` by agreement on every stored atom."""
    within = m.full if within is None else within
    groups: dict[tuple, int] = {}
    atoms_ = [v for v in m.valuation.values() if v & within]
    for w in bits(within):
        key = tuple(v >> w & 1 for v in atoms_)
        groups[key] = groups.get(key, 0) | 1 << w
    return sorted(groups.values(), key=lambda b: b & -b)


def valuation_classes(m: Model) -> list[ValuationClass]:
    return [ValuationClass((c & -c).bit_length() - 1, c) for c in class_masks(m)]


# -- the checker -----------------------------------------------------------

class Checker:
    """Memoized evaluator of ``ext(f, U)``: the worlds of U where f holds in m restricted to U.

    With ``box_family=None`` the Boolean quantifier ranges over unions of
    valuation classes of the current domain, which are exactly the extensions
    of Boolean formulas.  A family of masks instead makes it range over
    ``{h & U}`` for h in the family.
    """

    def __init__(self, m: Model, box_family: Optional[Sequence[int]] = None):
        self.m = m
        self.family = None if box_family is None else tuple(sorted(set(box_family)))
        self.memo: dict[tuple[Formula, int], int] = {}

    def ext(self, f: Formula, U: Optional[int] = None) -> int:
        U = self.m.full if U is None else U
        key = (f, U)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        r = self._ext(f, U)
        self.memo[key] = r
        return r

    def _ext(self, f: Formula, U: int) -> int:
        m = self.m
        if isinstance(f, Atom):
            return m.val(f.name) & U
        if isinstance(f, Not):
            return U & ~self.ext(f.f, U)
        if isinstance(f, And):
            left = self.ext(f.l, U)
            return left & self.ext(f.r, U) if left else 0
        if isinstance(f, Know):
            inner = self.ext(f.f, U)
            out = 0
            todo = U
            while todo:
                w = (todo & -todo).bit_length() - 1
                c = m.cell(f.agent, w) & U
                if not c & ~inner:
                    out |= c
                todo &= ~c
            return out
        if isinstance(f, Ann):
            A = self.ext(f.announced, U)
            return (U & ~A) | (self.ext(f.body, A) if A else 0)
        if isinstance(f, Box):
            bad = 0
            for W in self.domains(U):
                bad |= W & ~self.ext(f.f, W)
                if bad == U:
                    break
            return U & ~bad
        raise TypeError(f)

    def domains(self, U: int) -> Iterator[int]:
        """Nonempty announcement outcomes inside U."""
        if self.family is not None:
            seen = set()
            for h in self.family:
                W = h & U
                if W and W not in seen:
                    seen.add(W)
                    yield W
            return
        classes = class_masks(self.m, U)
        k = len(classes)
        for sel in range(1, 1 << k):
            W = 0
            for i in bits(sel):
                W |= classes[i]
            yield W

    def holds(self, w: int, f: Formula) -> bool:
        return bool(self.ext(f) >> w & 1)


def check(m: Model, s, f: Formula) -> bool:
    return Checker(m).holds(m.world(s), f)


def extension(m: Model, f: Formula) -> frozenset[int]:
    return frozenset(bits(Checker(m).ext(f)))


def extension_names(m: Model, f: Formula) -> list[str]:
    return [m.names[w] for w in bits(Checker(m).ext(f))]


# -- bounded Boolean enumeration oracle ------------------------------------

def boolean_representatives(m: Model, max_len: int, extra_atoms: int = 1) -> dict[int, Formula]:
    """Shortest Boolean formula (by node count, up to ``max_len``) for every reachable extension.

    Candidates range over the stored atoms plus ``extra_atoms`` atoms absent from m.
    """
    names = list(m.stored_atoms())
    i = 0
    while sum(1 for n in names if n.startswith("fresh")) < extra_atoms:
        if f"fresh{i}" not in m.valuation:
            names.append(f"fresh{i}")
        i += 1
    full = m.full
    reps: dict[int, Formula] = {}
    by_size: dict[int, list[tuple[int, Formula]]] = {}
    level = []
    for n in names:
        v = m.val(n)
        if v not in reps:
            reps[v] = Atom(n)
            level.append((v, Atom(n)))
    by_size[1] = level
    for size in range(2, max_len + 1):
        level = []
        for v, f in by_size.get(size - 1, ()):
            nv = full & ~v
            if nv not in reps:
                reps[nv] = Not(f)
                level.append((nv, Not(f)))
        for ls in range(1, size - 1):
            rs = size - 1 - ls
            for lv, lf in by_size.get(ls, ()):
                for rv, rf in by_size.get(rs, ()):
                    v = lv & rv
                    if v not in reps:
                        reps[v] = And(lf, rf)
                        level.append((v, And(lf, rf)))
        by_size[size] = level
        if len(reps) == 1 << len(class_masks(m)):
            break
    return reps


def bounded_boolean_box(m: Model, s, body: Formula, max_len: int) -> bool:
    """□body at s by trying every Boolean announcement of length at most ``max_len``."""
    s = m.world(s)
    chk = Checker(m)
    for f in boolean_representatives(m, max_len).values():
        if not chk.holds(s, Ann(f, body)):
            return False
    return True


def characteristic_length(m: Model) -> int:
    """Node count of the disjunction of all class characteristic conjunctions."""
    k = len(m.stored_atoms())
    per_class = 2 * k + max(k - 1, 0) + 1
    n = len(class_masks(m))
    # disjunction of n terms as nested ~(~a & ~b): 3 extra nodes per join
    return n * per_class + 3 * max(n - 1, 0) + 2


# -- random models ---------------------------------------------------------

@lru_cache(maxsize=None)
def _count_partitions(n: int, k: int) -> int:
    # number of ways to finish a restricted-growth string of length n with k blocks open
    if n == 0:
        return 1
    return k * _count_partitions(n - 1, k) + _count_partitions(n - 1, k + 1)


def random_partition(rng: random.Random, n: int) -> list[int]:
    """Uniformly random set partition of range(n), as block masks."""
    label = []
    k = 0
    for i in range(n):
        rest = n - i - 1
        new_weight = _count_partitions(rest, k + 1)
        total = k * _count_partitions(rest, k) + new_weight
        r = rng.randrange(total)
        if r < new_weight:
            label.append(k)
            k += 1
        else:
            label.append((r - new_weight) // _count_partitions(rest, k))
    blocks = [0] * k
    for w, b in enumerate(label):
        blocks[b] |= 1 << w
    return blocks


def random_model(seed, max_worlds: int, max_atoms: int, agents=("a", "b"),
                 exact: bool = False) -> Model:
    """Deterministic in ``seed``; world and atom counts are drawn up to the bounds."""
    if max_worlds < 1 or max_atoms < 1:
        raise ValueError("bounds must be positive")
    if isinstance(agents, int):
        agents = tuple("abcdefgh"[:agents])
    rng = random.Random(seed)
    n = max_worlds if exact else rng.randint(1, max_worlds)
    k = max_atoms if exact else rng.randint(1, max_atoms)
    atom_names = [chr(ord("p") + i) if i < 10 else f"p{i}" for i in range(k)]
    blocks = {a: tuple(random_partition(rng, n)) for a in agents}
    val = {p: rng.getrandbits(n) for p in atom_names}
    return Model(tuple(f"w{i}" for i in range(n)), tuple(agents), blocks, val,
                 rng.randrange(n), {"seed": seed})


def all_partitions(n: int) -> Iterator[list[int]]:
    """Every set partition of range(n), as sorted block masks."""
    def rec(i, blocks):
        if i == n:
            yield list(blocks)
            return
        for j in range(len(blocks)):
            blocks[j] |= 1 << i
            yield from rec(i + 1, blocks)
            blocks[j] &= ~(1 << i)
        blocks.append(1 << i)
        yield from rec(i + 1, blocks)
        blocks.pop()
    yield from rec(0, [])


def all_models(n: int, atom_names: Sequence[str], agents: Sequence[str]) -> Iterator[Model]:
    """Exhaustive (not isomorphism-reduced) enumeration of n-world models."""
    names = tuple(f"w{i}" for i in range(n))
    parts = list(all_partitions(n))

    def rel(i, acc):
        if i == len(agents):
            yield dict(acc)
            return
        for p in parts:
            acc[agents[i]] = tuple(p)
            yield from rel(i + 1, acc)

    for blocks in rel(0, {}):
        for code in range(1 << (n * len(atom_names))):
            val = {}
            for j, p in enumerate(atom_names):
                val[p] = (code >> (j * n)) & ((1 << n) - 1)
            yield Model(names, tuple(agents), blocks, val, 0)


# -- serialization ---------------------------------------------------------

def to_json(m: Model) -> dict:
    out = {
        "agents": list(m.agents),
        "worlds": list(m.names),
        "relations": {a: [[m.names[w] for w in bits(b)] for b in m.blocks[a]] for a in m.agents},
        "valuation": {p: [m.names[w] for w in bits(v)] for p, v in sorted(m.valuation.items())},
    }
    if m.designated is not None:
        out["designated"] = m.names[m.designated]
    if m.metadata:
        out["metadata"] = dict(m.metadata)
    return out


def from_json(data: Mapping) -> Model:
    try:
        names = list(data["worlds"])
        relations = data.get("relations", {})
        agents = list(data.get("agents", sorted(relations)))
        valuation = data.get("valuation", {})
    except (KeyError, TypeError) as e:
        raise ModelError(f"malformed model: {e}") from None
    if not all(isinstance(w, str) for w in names):
        raise ModelError("world names must be strings")
    index = set(names)
    for a, blks in relations.items():
        if a not in agents:
            raise ModelError(f"relation for undeclared agent {a!r}")
        seen = set()
        for blk in blks:
            for w in blk:
                if w not in index:
                    raise ModelError(f"unknown world {w!r} in relation {a!r}")
                if w in seen:
                    raise ModelError(f"world {w!r} appears twice in relation {a!r}")
                seen.add(w)
        if seen != index:
            raise ModelError(f"relation {a!r} does not cover every world")
    for a in agents:
        if a not in relations:
            raise ModelError(f"agent {a!r} has no relation")
    return make_model(names, relations, valuation, data.get("designated"), agents,
                      data.get("metadata"))


def load(path) -> Model:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ModelError(f"invalid JSON: {e}") from None
    return from_json(data)


def save(m: Model, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_json(m), fh, indent=2, sort_keys=True)
        fh.write("\n")


_STYLES = ("solid", "dashed", "dotted", "bold")


def to_dot(m: Model) -> str:
    lines = ["graph model {"]
    for w, n in enumerate(m.names):
        label = n + ":" + "".join(sorted(m.true_atoms(w)))
        shape = "doublecircle" if w == m.designated else "circle"
        lines.append(f'  "{n}" [label="{label}", shape={shape}];')
    for i, a in enumerate(m.agents):
        style = _STYLES[i % len(_STYLES)]
        for b in m.blocks[a]:
            ws = list(bits(b))
            for x, y in zip(ws, ws[1:]):
                lines.append(f'  "{m.names[x]}" -- "{m.names[y]}" [label="{a}", style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def characteristic(m: Model, w: int, atom_names: Optional[Sequence[str]] = None) -> Formula:
    """Conjunction of the literals true at w over the given (default: stored) atoms."""
    names = atom_names if atom_names is not None else m.stored_atoms()
    lits = [Atom(p) if m.val(p) >> w & 1 else Not(Atom(p)) for p in names]
    return conj(lits)
