"""Formula AST, text grammar, metrics, AANF subformulas and closures.

Formulas are immutable trees built from six primitives: ``Atom``, ``Not``,
``And``, ``Know``, ``Ann`` (public announcement ``[phi]psi``) and ``Box``
(quantification over Boolean announcements).  Everything else (``|``,
``->``, ``Khat``, ``<phi>``, ``dia``, ``true``) is sugar that expands to
primitives at construction time.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional


class Formula:
    """Base class.  Subclasses are frozen dataclasses with a cached hash."""

    __slots__ = ()

    def __invert__(self) -> "Formula":
        return Not(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Implies(self, other)

    def __str__(self) -> str:
        return to_text(self)

    def children(self) -> tuple["Formula", ...]:
        raise NotImplementedError


def _cached_hash(self) -> int:
    h = self._hash
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, n) for n in self._fields))
        object.__setattr__(self, "_hash", h)
    return h


@dataclass(frozen=True, eq=True, repr=False)
class Atom(Formula):
    name: str
    _hash: Optional[int] = field(default=None, compare=False, repr=False)
    _fields = ("name",)
    __hash__ = _cached_hash

    def children(self):
        return ()

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Not(Formula):
    f: Formula
    _hash: Optional[int] = field(default=None, compare=False, repr=False)
    _fields = ("f",)
    __hash__ = _cached_hash

    def children(self):
        return (self.f,)

    def __repr__(self):
        return f"Not({self.f!r})"


@dataclass(frozen=True, eq=True, repr=False)
class And(Formula):
    l: Formula
    r: Formula
    _hash: Optional[int] = field(default=None, compare=False, repr=False)
    _fields = ("l", "r")
    __hash__ = _cached_hash

    def children(self):
        return (self.l, self.r)

    def __repr__(self):
        return f"And({self.l!r}, {self.r!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Know(Formula):
    agent: str
    f: Formula
    _hash: Optional[int] = field(default=None, compare=False, repr=False)
    _fields = ("agent", "f")
    __hash__ = _cached_hash

    def children(self):
        return (self.f,)

    def __repr__(self):
        return f"Know({self.agent!r}, {self.f!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Ann(Formula):
    announced: Formula
    body: Formula
    _hash: Optional[int] = field(default=None, compare=False, repr=False)
    _fields = ("announced", "body")
    __hash__ = _cached_hash

    def children(self):
        return (self.announced, self.body)

    def __repr__(self):
        return f"Ann({self.announced!r}, {self.body!r})"


@dataclass(frozen=True, eq=True, repr=False)
class Box(Formula):
    f: Formula
    _hash: Optional[int] = field(default=None, compare=False, repr=False)
    _fields = ("f",)
    __hash__ = _cached_hash

    def children(self):
        return (self.f,)

    def __repr__(self):
        return f"Box({self.f!r})"


# -- sugar -----------------------------------------------------------------

def Or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def Implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def Khat(agent: str, f: Formula) -> Formula:
    return Not(Know(agent, Not(f)))


def DiaAnn(announced: Formula, body: Formula) -> Formula:
    return Not(Ann(announced, Not(body)))


def Dia(f: Formula) -> Formula:
    return Not(Box(Not(f)))


# Reserved atom for the tautology; the grammar has no constant.
TOP_ATOM = "top0"
TOP = Or(Atom(TOP_ATOM), Not(Atom(TOP_ATOM)))
BOTTOM = Not(TOP)


def conj(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return TOP
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return BOTTOM
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


# -- metrics ---------------------------------------------------------------

def atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    out: frozenset[str] = frozenset()
    for c in f.children():
        out |= atoms(c)
    return out


def agents(f: Formula) -> frozenset[str]:
    out = frozenset((f.agent,)) if isinstance(f, Know) else frozenset()
    for c in f.children():
        out |= agents(c)
    return out


def modal_depth(f: Formula) -> int:
    """Nesting of K operators; announcements add the depth of the announced formula."""
    if isinstance(f, Atom):
        return 0
    if isinstance(f, (Not, Box)):
        return modal_depth(f.f)
    if isinstance(f, And):
        return max(modal_depth(f.l), modal_depth(f.r))
    if isinstance(f, Know):
        return modal_depth(f.f) + 1
    if isinstance(f, Ann):
        return modal_depth(f.announced) + modal_depth(f.body)
    raise TypeError(f)


def quantifier_depth(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, (Not, Know)):
        return quantifier_depth(f.f)
    if isinstance(f, And):
        return max(quantifier_depth(f.l), quantifier_depth(f.r))
    if isinstance(f, Ann):
        return max(quantifier_depth(f.announced), quantifier_depth(f.body))
    if isinstance(f, Box):
        return quantifier_depth(f.f) + 1
    raise TypeError(f)


@dataclass(frozen=True)
class Metrics:
    vars: frozenset[str]
    d: int
    D: int


def metrics(f: Formula) -> Metrics:
    return Metrics(atoms(f), modal_depth(f), quantifier_depth(f))


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in f.children())


def is_boolean(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, (Not, And)):
        return all(is_boolean(c) for c in f.children())
    return False


def is_epistemic(f: Formula) -> bool:
    if isinstance(f, (Ann, Box)):
        return False
    return all(is_epistemic(c) for c in f.children())


# -- AANF ------------------------------------------------------------------

class NotAANFError(ValueError):
    pass


def is_aanf(f: Formula) -> bool:
    """True iff every announcement wraps a Box directly and every Box sits under one."""
    if isinstance(f, Atom):
        return True
    if isinstance(f, Box):
        return False
    if isinstance(f, Ann):
        return (isinstance(f.body, Box) and is_aanf(f.announced)
                and is_aanf(f.body.f))
    return all(is_aanf(c) for c in f.children())


def aanf_children(f: Formula) -> tuple[Formula, ...]:
    # [a]box psi contributes a and psi; box psi is not a subformula.
    if isinstance(f, Ann):
        return (f.announced, f.body.f)
    return f.children()


def subformulas(f: Formula) -> frozenset[Formula]:
    if not is_aanf(f):
        raise NotAANFError(f"not in announcement normal form: {to_text(f)}")
    out: set[Formula] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        stack.extend(aanf_children(g))
    return frozenset(out)


def strip_double_negations(f: Formula) -> Formula:
    """Remove every ~~ pair, at any position."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        inner = f.f
        if isinstance(inner, Not):
            return strip_double_negations(inner.f)
        return Not(strip_double_negations(inner))
    if isinstance(f, And):
        return And(strip_double_negations(f.l), strip_double_negations(f.r))
    if isinstance(f, Know):
        return Know(f.agent, strip_double_negations(f.f))
    if isinstance(f, Ann):
        return Ann(strip_double_negations(f.announced), strip_double_negations(f.body))
    if isinstance(f, Box):
        return Box(strip_double_negations(f.f))
    raise TypeError(f)


def neg(f: Formula) -> Formula:
    """Negation with ~~psi read as psi."""
    return f.f if isinstance(f, Not) else Not(f)


def positive(f: Formula) -> Formula:
    return f.f if isinstance(f, Not) else f


# -- closure ---------------------------------------------------------------

class BudgetOverflowError(ValueError):
    pass


# Largest literal fresh-atom count we agree to materialize.
DEFAULT_MATERIALIZATION_CAP = 64


def fresh_count(cl_size: int, D: int) -> Optional[int]:
    """f(0) = |cl|, f(i+1) = 2**2**f(i); None once the value is not representable."""
    value = cl_size
    for _ in range(D):
        if value > 20:
            return None
        value = 2 ** (2 ** value)
    return value


def fresh_count_expr(cl_size: int, D: int) -> str:
    expr = str(cl_size)
    for _ in range(D):
        expr = f"2^2^({expr})"
    return expr


def _closure_set(f: Formula, memo: dict) -> frozenset[Formula]:
    if f in memo:
        return memo[f]
    subs = subformulas(f)
    out: set[Formula] = set()
    for g in subs:
        out.add(g)
        out.add(neg(g))
    if modal_depth(f) > 0:
        for g in subs:
            if isinstance(g, Know):
                for h in _closure_set(g.f, memo):
                    k = Know(g.agent, h)
                    out.add(k)
                    out.add(Not(k))
    res = frozenset(out)
    memo[f] = res
    return res


def _closure_key(f: Formula):
    return (quantifier_depth(f), modal_depth(f), size(f), to_text(f))


@dataclass(frozen=True)
class ClosureTable:
    root: Formula
    cl: tuple[Formula, ...]
    fresh_count: Optional[int]
    fresh_expr: str
    atoms_col: frozenset[str]
    atoms_hue: tuple[str, ...]
    faithful: bool

    @property
    def base(self) -> tuple[Formula, ...]:
        """Closure members that are not negations, ordered subformulas-first."""
        return tuple(g for g in self.cl if not isinstance(g, Not))

    @property
    def boxes(self) -> tuple[Ann, ...]:
        return tuple(g for g in self.cl if isinstance(g, Ann))

    def is_act(self, atom: str) -> bool:
        return atom not in self.atoms_col and atom not in self.atoms_hue


def closure_formulas(f: Formula) -> tuple[Formula, ...]:
    """cl(f) for an AANF formula, double negations stripped, in a stable order."""
    f = strip_double_negations(f)
    return tuple(sorted(_closure_set(f, {}), key=_closure_key))


def hue_names(n: int, avoid: frozenset[str], prefix: str = "h") -> tuple[str, ...]:
    out = []
    i = 0
    while len(out) < n:
        name = f"{prefix}{i}"
        if name not in avoid:
            out.append(name)
        i += 1
    return tuple(out)


def closure(f: Formula, hue_budget: Optional[int] = None,
            cap: int = DEFAULT_MATERIALIZATION_CAP) -> ClosureTable:
    """Closure table with a materialized set of hue atoms.

    Without ``hue_budget`` the literal fresh-atom count f(D) is used, and
    :class:`BudgetOverflowError` is raised when it exceeds ``cap``.
    """
    if not is_aanf(f):
        raise NotAANFError(f"not in announcement normal form: {to_text(f)}")
    f = strip_double_negations(f)
    cl = closure_formulas(f)
    D = quantifier_depth(f)
    count = fresh_count(len(cl), D)
    expr = fresh_count_expr(len(cl), D)
    col = atoms(f)
    if hue_budget is None:
        if count is None or count > cap:
            raise BudgetOverflowError(
                f"fresh atom count {expr} exceeds materialization cap {cap}")
        n_hue, faithful = count, True
    else:
        n_hue, faithful = hue_budget, hue_budget == count
    return ClosureTable(f, cl, count, expr, col, hue_names(n_hue, col), faithful)


# -- text grammar ----------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int, text: str):
        super().__init__(f"{msg} at position {pos}: {text[:pos]}<<here>>{text[pos:]}")
        self.pos = pos


KEYWORDS = {"box", "dia", "true", "false"}
_TOKEN = re.compile(r"\s*(?:(<->|->|[~&|()\[\]<>])|(Khat|K)\b|([a-z0-9][a-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos and m.lastindex is None:
            break
        if m.lastindex is None:
            break
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("op", m.group(1), start))
        elif m.group(2):
            toks.append(("kop", m.group(2), start))
        elif m.group(3):
            word = m.group(3)
            toks.append(("kw" if word in KEYWORDS else "id", word, start))
        else:
            raise FormulaSyntaxError(f"unknown operator {m.group(4)!r}", start, text)
        pos = m.end()
    if text[pos:].strip():
        raise FormulaSyntaxError("unexpected input", pos, text)
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, value=None):
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            raise FormulaSyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}",
                                     tok[2], self.text)
        self.i += 1
        return tok

    def at(self, value):
        tok = self.peek()
        return tok[0] in ("op", "kop", "kw") and tok[1] == value

    def parse(self) -> Formula:
        f = self.iff()
        self.take("eof")
        return f

    def iff(self):
        f = self.implies()
        while self.at("<->"):
            self.take()
            f = Iff(f, self.implies())
        return f

    def implies(self):
        f = self.disj()
        if self.at("->"):
            self.take()
            return Implies(f, self.implies())
        return f

    def disj(self):
        f = self.conj()
        while self.at("|"):
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.at("&"):
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val == "~":
            self.take()
            return Not(self.unary())
        if kind == "kop":
            self.take()
            agent = self.take("id")[1]
            body = self.unary()
            return Know(agent, body) if val == "K" else Khat(agent, body)
        if kind == "op" and val == "[":
            self.take()
            a = self.iff()
            self.take("op", "]")
            return Ann(a, self.unary())
        if kind == "op" and val == "<":
            self.take()
            a = self.iff()
            self.take("op", ">")
            return DiaAnn(a, self.unary())
        if kind == "kw" and val == "box":
            self.take()
            return Box(self.unary())
        if kind == "kw" and val == "dia":
            self.take()
            return Dia(self.unary())
        if kind == "kw" and val == "true":
            self.take()
            return TOP
        if kind == "kw" and val == "false":
            self.take()
            return BOTTOM
        if kind == "op" and val == "(":
            self.take()
            f = self.iff()
            self.take("op", ")")
            return f
        if kind == "id":
            self.take()
            return Atom(val)
        raise FormulaSyntaxError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse(text: str) -> Formula:
    return _Parser(text).parse()


def to_text(f: Formula) -> str:
    """Print with primitives only; binary nodes are always parenthesized."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + to_text(f.f)
    if isinstance(f, And):
        return f"({to_text(f.l)} & {to_text(f.r)})"
    if isinstance(f, Know):
        return f"K {f.agent} {to_text(f.f)}"
    if isinstance(f, Ann):
        return f"[{to_text(f.announced)}] {to_text(f.body)}"
    if isinstance(f, Box):
        return "box " + to_text(f.f)
    raise TypeError(f)


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    for c in f.children():
        yield from walk(c)
