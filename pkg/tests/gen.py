"""Random formulas and models shared by the test modules."""
import random

from hypothesis import strategies as st

from bapal.syntax import TOP, And, Ann, Atom, Box, Know, Not, Or

ATOMS = ("p", "q", "r")
AGENTS = ("a", "b")


def random_boolean(rng: random.Random, depth: int, atoms=ATOMS):
    if depth <= 0 or rng.random() < 0.3:
        return Atom(rng.choice(atoms))
    k = rng.randrange(3)
    if k == 0:
        return Not(random_boolean(rng, depth - 1, atoms))
    op = And if k == 1 else Or
    return op(random_boolean(rng, depth - 1, atoms), random_boolean(rng, depth - 1, atoms))


def random_formula(rng: random.Random, depth: int, atoms=ATOMS, agents=AGENTS, boxes=True,
                   announcements=True):
    if depth <= 0 or rng.random() < 0.2:
        return Atom(rng.choice(atoms))
    kinds = ["not", "and", "know"] + (["ann"] if announcements else []) + (["box"] if boxes else [])
    k = rng.choice(kinds)
    sub = lambda: random_formula(rng, depth - 1, atoms, agents, boxes, announcements)  # noqa: E731
    if k == "not":
        return Not(sub())
    if k == "and":
        return And(sub(), sub())
    if k == "know":
        return Know(rng.choice(agents), sub())
    if k == "ann":
        return Ann(sub(), sub())
    return Box(sub())


def formulas(max_leaves=12, atoms=ATOMS, agents=AGENTS, boxes=True):
    leaves = st.sampled_from([Atom(p) for p in atoms])

    def extend(children):
        parts = [
            children.map(Not),
            st.tuples(children, children).map(lambda t: And(*t)),
            st.tuples(st.sampled_from(agents), children).map(lambda t: Know(*t)),
            st.tuples(children, children).map(lambda t: Ann(*t)),
        ]
        if boxes:
            parts.append(children.map(Box))
        return st.one_of(parts)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def tautology():
    return TOP


def bisimilar_copy(m, rng: random.Random):
    """A shuffled blow-up of m with a map from its worlds to their originals.

    Every world gets one or two copies.  Each agent block is spread over
    as many new blocks as its fewest-copied member allows, so every new block
    still contains a copy of each original member.
    """
    from bapal.kripke import Model, bits

    copies = []
    for w in range(m.size):
        copies += [w] * rng.randint(1, 2)
    rng.shuffle(copies)
    of = {w: [i for i, c in enumerate(copies) if c == w] for w in range(m.size)}
    blocks = {}
    for a in m.agents:
        out = []
        for b in m.blocks[a]:
            ws = list(bits(b))
            r = min(len(of[w]) for w in ws)
            parts = [0] * r
            for w in ws:
                cs = of[w][:]
                rng.shuffle(cs)
                for i in range(r):
                    parts[i] |= 1 << cs[i]
                for c in cs[r:]:
                    parts[rng.randrange(r)] |= 1 << c
            out += parts
        blocks[a] = tuple(out)
    val = {p: sum(1 << i for i, c in enumerate(copies) if v >> c & 1) for p, v in m.valuation.items()}
    n = Model(tuple(f"v{i}" for i in range(len(copies))), m.agents, blocks, val)
    return n, copies
