"""Work budgets for the exhaustive searches.

Every search charges abstract work units (one unit is roughly one field
multiplication inside a grid sweep). Running past the limit raises
``BudgetExceeded``; callers turn that into an Inconclusive outcome.
"""

from __future__ import annotations

import os

DEFAULT_BUDGET = 20_000_000
ENV_VAR = "TCC_BUDGET"


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, needed: int | None = None, limit: int | None = None):
        self.what = what
        self.needed = needed
        self.limit = limit
        detail = f"{what}: budget exhausted"
        if needed is not None:
            detail += f" (needs ~{needed}, limit {limit})"
        super().__init__(detail)


def default_budget() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw:
        return int(raw)
    return DEFAULT_BUDGET


class Budget:
    def __init__(self, limit: int | None = None):
        self.limit = default_budget() if limit is None else int(limit)
        self.spent = 0
        self._paid: set = set()

    def charge(self, units: int, what: str = "search") -> None:
        self.spent += units
        if self.spent > self.limit:
            raise BudgetExceeded(what, self.spent, self.limit)

    def charge_once(self, key, units: int, what: str = "search") -> None:
        """Charge for a memoized computation the first time this budget sees ``key``.

        Accounting depends only on what this budget has paid for, never on
        process-wide caches, so repeated runs spend identical amounts.
        """
        if key in self._paid:
            return
        self._paid.add(key)
        self.charge(units, what)

    def require(self, units: int, what: str) -> None:
        """Fail fast when a single step alone would blow the remaining budget."""
        if self.spent + units > self.limit:
            raise BudgetExceeded(what, self.spent + units, self.limit)

    @property
    def remaining(self) -> int:
        return max(self.limit - self.spent, 0)

    def __repr__(self) -> str:
        return f"Budget({self.spent}/{self.limit})"


def unlimited() -> Budget:
    return Budget(1 << 62)
