"""Element and time budgets, configurable through environment variables."""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

from .errors import ResourceError

ELEMENT_BUDGET_ENV = "ABSORDER_ELEMENT_BUDGET"
TIME_BUDGET_ENV = "ABSORDER_TIME_BUDGET"
DEFAULT_ELEMENT_BUDGET = 10**7
# Pairwise O(N^2) relation builds keep an N x N matrix in memory.
DEFAULT_PAIRWISE_BUDGET = 6000


@dataclass
class Budget:
    elements: int = DEFAULT_ELEMENT_BUDGET
    pairwise: int = DEFAULT_PAIRWISE_BUDGET
    seconds: float | None = None
    _start: float = field(default_factory=time.monotonic, repr=False)

    @classmethod
    def from_env(cls) -> "Budget":
        elements = int(os.environ.get(ELEMENT_BUDGET_ENV, DEFAULT_ELEMENT_BUDGET))
        seconds = os.environ.get(TIME_BUDGET_ENV)
        return cls(elements=elements, seconds=float(seconds) if seconds else None)

    def check_elements(self, count: int, what: str = "group") -> None:
        if count > self.elements:
            raise ResourceError(
                f"{what} needs {count} elements, above the element budget "
                f"{self.elements} (set {ELEMENT_BUDGET_ENV} to raise it)"
            )

    def check_pairwise(self, count: int, what: str = "pairwise relation") -> None:
        if count > self.pairwise:
            raise ResourceError(
                f"{what} on {count} elements exceeds the pairwise budget {self.pairwise}"
            )

    def check_time(self) -> None:
        if self.seconds is not None and time.monotonic() - self._start > self.seconds:
            raise ResourceError(
                f"time budget of {self.seconds:g} s exceeded (set {TIME_BUDGET_ENV} to raise it)"
            )


def default_budget() -> Budget:
    return Budget.from_env()
