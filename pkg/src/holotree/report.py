from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from holotree.arena import TreeArena

OK, FAIL, NEED = 0, 1, 2


@dataclass
class SampleReport:
    size: int
    bits_consumed: int
    restarts: int = 0
    repoint_fallbacks: int = 0
    wall_time_ns: int = 0
    travel: int = 0

    @property
    def wall_time(self) -> float:
        return self.wall_time_ns * 1e-9


class Run(NamedTuple):
    """Outcome of one kernel invocation, point included (instrumented view)."""

    status: int
    tree: TreeArena | None
    point: object
    travel: int
    fallbacks: int
    restarts: int
