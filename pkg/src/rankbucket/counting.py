"""Operation counters shared by the loss implementations and the bench.

Two cost families are tracked separately: difference-transform evaluations
(the pairwise score subtractions at the heart of every loss) and sort
comparisons. Linear bookkeeping passes go into a third bin so that
``total_ops`` reflects everything an implementation touched. The sort cost
uses the standard n*ceil(log2 n) comparison model because the library sort
cannot be instrumented per comparison.
"""

from __future__ import annotations

import dataclasses
import math

__all__ = ["OpCounters", "sort_cost_model"]


def sort_cost_model(n: int) -> int:
    """Comparison-model cost of sorting n elements."""
    if n < 2:
        return 0
    return n * math.ceil(math.log2(n))


@dataclasses.dataclass
class OpCounters:
    diff_ops: int = 0
    sort_ops: int = 0
    pass_ops: int = 0

    @property
    def total_ops(self) -> int:
        return self.diff_ops + self.sort_ops + self.pass_ops

    def count_diffs(self, n: int) -> None:
        if n < 0:
            raise ValueError("counts only accumulate")
        self.diff_ops += int(n)

    def count_sort(self, n: int) -> None:
        if n < 0:
            raise ValueError("counts only accumulate")
        self.sort_ops += int(n)

    def count_pass(self, n: int) -> None:
        if n < 0:
            raise ValueError("counts only accumulate")
        self.pass_ops += int(n)
