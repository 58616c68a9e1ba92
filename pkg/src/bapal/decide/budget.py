from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Optional


class ResourceExhausted(Exception):
    """A search ran out of one budget dimension; never a verdict of falsity."""

    def __init__(self, dimension: str, detail: str = ""):
        super().__init__(f"{dimension} budget exhausted" + (f": {detail}" if detail else ""))
        self.dimension = dimension
        self.detail = detail


@dataclass(frozen=True)
class Budget:
    max_states: int = 20_000  # candidate colours (maximal-set colour parts)
    max_hue: int = 4_096  # hue denotations per pseudo-model
    max_nodes: int = 200_000  # search nodes: witness attempts, candidate models
    timeout: Optional[float] = 60.0  # seconds of wall time
    max_model_worlds: int = 4  # largest candidate model tried at quantifier depth >= 1

    def to_json(self) -> dict:
        return asdict(self)


class Tracker:
    """Mutable counters checked against a Budget."""

    def __init__(self, budget: Budget | None = None):
        self.budget = budget or Budget()
        self.start = time.monotonic()
        self.nodes = 0

    def tick(self, n: int = 1) -> None:
        self.nodes += n
        if self.nodes > self.budget.max_nodes:
            raise ResourceExhausted("nodes", f"more than {self.budget.max_nodes} search nodes")
        if self.nodes % 64 == 0:
            self.check_time()

    def check_time(self) -> None:
        t = self.budget.timeout
        if t is not None and time.monotonic() - self.start > t:
            raise ResourceExhausted("time", f"wall time above {t} s")

    def check_states(self, n: int) -> None:
        if n > self.budget.max_states:
            raise ResourceExhausted("states", f"more than {self.budget.max_states} colours")

    def check_hue(self, n: int) -> None:
        if n > self.budget.max_hue:
            raise ResourceExhausted("hue", f"{n} hue denotations exceed {self.budget.max_hue}")

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.start
