"""Rewriting into announcement normal form with the reduction axioms.

Every announcement must end up directly above a Box and every Box directly
below an announcement.  Redexes are announcements whose body is not a Box,
plus Box nodes that are not such a body.  They are rewritten leftmost
innermost, one step at a time, and every step is recorded.

Termination: with the weight ``c`` below, each rule maps its redex to a
strictly lighter term, and ``c`` is strictly monotone in every argument.  No
rule creates a bare Box, so the pair (bare Boxes, c) falls lexicographically
at every step; the rewriter asserts this.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .syntax import (TOP, And, Ann, Atom, Box, Formula, Know, Not, is_aanf,
                     strip_double_negations, to_text)

Path = tuple[int, ...]


@dataclass(frozen=True)
class Step:
    axiom: str
    path: Path
    before: Formula
    after: Formula

    def __str__(self):
        where = ".".join(map(str, self.path)) or "root"
        return f"{self.axiom:4} at {where}: {to_text(self.before)}  =>  {to_text(self.after)}"


RewriteTrace = list[Step]


def weight(f: Formula) -> int:
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (Not, Know, Box)):
        return 1 + weight(f.f)
    if isinstance(f, And):
        return 1 + weight(f.l) + weight(f.r)
    if isinstance(f, Ann):
        return (5 + weight(f.announced)) * weight(f.body)
    raise TypeError(f)


def bare_boxes(f: Formula, under_ann: bool = False) -> int:
    n = 1 if isinstance(f, Box) and not under_ann else 0
    if isinstance(f, Ann):
        return (n + bare_boxes(f.announced)
                + bare_boxes(f.body, under_ann=isinstance(f.body, Box)))
    return n + sum(bare_boxes(c) for c in f.children())


def measure(f: Formula) -> tuple[int, int]:
    return bare_boxes(f), weight(f)


def _rule(f: Formula) -> Optional[tuple[str, Formula]]:
    """Rewrite f at the root if it is a redex (Box-as-body handled by the caller)."""
    if isinstance(f, Box):
        return "ABox", Ann(TOP, f)
    if not isinstance(f, Ann) or isinstance(f.body, Box):
        return None
    a, body = f.announced, f.body
    if isinstance(body, Atom):
        return "AP", Not(And(a, Not(body)))
    if isinstance(body, Not):
        return "AN", Not(And(a, Ann(a, body.f)))
    if isinstance(body, And):
        return "AC", And(Ann(a, body.l), Ann(a, body.r))
    if isinstance(body, Know):
        return "AK", Not(And(a, Not(Know(body.agent, Ann(a, body.f)))))
    if isinstance(body, Ann):
        return "AA", Ann(And(a, Ann(a, body.announced)), body.body)
    raise TypeError(body)


def _children(f: Formula) -> list[tuple[Formula, bool]]:
    """Children paired with whether a Box child is legitimately paired."""
    if isinstance(f, Ann):
        return [(f.announced, False), (f.body, True)]
    return [(c, False) for c in f.children()]


def _find(f: Formula, paired: bool = False, path: Path = ()) -> Optional[tuple[Path, str, Formula]]:
    """Leftmost innermost redex."""
    if isinstance(f, Box) and paired:
        inner = _find(f.f, False, path + (0,))
        return inner
    for i, (c, ok) in enumerate(_children(f)):
        hit = _find(c, ok, path + (i,))
        if hit:
            return hit
    r = _rule(f)
    if r is None:
        return None
    return path, r[0], r[1]


def _rebuild(f: Formula, kids: list[Formula]) -> Formula:
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, And):
        return And(kids[0], kids[1])
    if isinstance(f, Know):
        return Know(f.agent, kids[0])
    if isinstance(f, Ann):
        return Ann(kids[0], kids[1])
    if isinstance(f, Box):
        return Box(kids[0])
    raise TypeError(f)


def at(f: Formula, path: Path) -> Formula:
    for i in path:
        f = f.children()[i]
    return f


def replace(f: Formula, path: Path, new: Formula) -> Formula:
    if not path:
        return new
    kids = list(f.children())
    kids[path[0]] = replace(kids[path[0]], path[1:], new)
    return _rebuild(f, kids)


def to_aanf(f: Formula, on_step: Optional[Callable[[Step], None]] = None,
            max_steps: int = 1_000_000) -> tuple[Formula, RewriteTrace]:
    """Equivalent formula in announcement normal form, with the rewrite trace."""
    trace: RewriteTrace = []
    cur = f
    last = measure(cur)
    for _ in range(max_steps):
        hit = _find(cur)
        if hit is None:
            break
        path, axiom, after = hit
        step = Step(axiom, path, at(cur, path), after)
        cur = replace(cur, path, after)
        now = measure(cur)
        assert now < last, f"termination measure did not decrease at {step}"
        last = now
        trace.append(step)
        if on_step:
            on_step(step)
    else:
        raise RuntimeError("rewrite step limit reached")
    assert is_aanf(cur)
    return cur, trace


def normalize(f: Formula) -> Formula:
    """Normal form with double negations removed, as used by the decision procedure."""
    return strip_double_negations(to_aanf(f)[0])


def replay(f: Formula, trace: RewriteTrace) -> Formula:
    """Re-apply a trace from its input, checking each recorded redex."""
    cur = f
    for step in trace:
        if at(cur, step.path) != step.before:
            raise ValueError(f"trace does not match at {step}")
        cur = replace(cur, step.path, step.after)
    return cur
