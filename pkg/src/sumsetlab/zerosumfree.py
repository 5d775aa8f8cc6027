"""Zero-sum-free sets of residues and n-small sets.

Convention used throughout: the empty set is zero-sum-free (no nonempty
subset exists), and sets are subsets of Z_p with 0 never a member.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import _bits
from .core import ResidueSet
from .errors import CapExceeded, PreconditionError

# sqrt(1/3) * pi * log2(e)
EXPONENT = math.sqrt(1 / 3) * math.pi * math.log2(math.e)
DEFAULT_NODE_BUDGET = 50_000_000
CONVENTION = "empty set counted; 0 excluded from every set"


def is_zero_sum_free(A: ResidueSet) -> bool:
    """True iff no nonempty subset of A sums to 0 mod p (subset-sum reachability)."""
    p = A.modulus
    mask = (1 << p) - 1
    reach = 0           # residues reachable by nonempty subsets
    for a in A.members:
        reach |= _bits.rotl(reach | 1, a, p, mask)
        if reach & 1:
            return False
    return True


@dataclass(frozen=True)
class ZsfReport:
    p: int
    count: int
    max_size: int
    nodes: int
    convention: str = CONVENTION

    @property
    def log2_count_over_sqrt(self) -> float:
        return math.log2(self.count) / math.sqrt(self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "count": str(self.count), "max_size": self.max_size,
                "log2_count_over_sqrt": self.log2_count_over_sqrt, "nodes": self.nodes,
                "convention": self.convention}


class BudgetExceeded(CapExceeded):
    def __init__(self, partial, nodes):
        super().__init__(f"node budget exhausted after {nodes} nodes; partial count {partial} "
                         "is a lower bound, not the total")
        self.partial = partial
        self.nodes = nodes


def count_zero_sum_free(p: int, budget: int = DEFAULT_NODE_BUDGET) -> ZsfReport:
    """Exact count of zero-sum-free subsets of Z_p \\ {0}, by backtracking.

    Elements are added in increasing order; the state is the mask R of
    residues reachable by nonempty subsets.  Adding a keeps the set
    zero-sum-free iff -a is not in R and a != 0; the new mask is
    R | {a} | (R + a).
    """
    if p < 2:
        raise PreconditionError("p must be at least 2")
    mask = (1 << p) - 1
    count = 0
    nodes = 0
    best = 0
    # iterative DFS: (next element, reach mask, size)
    stack = [(1, 0, 0)]
    while stack:
        start, reach, size = stack.pop()
        nodes += 1
        count += 1
        if size > best:
            best = size
        if nodes > budget:
            raise BudgetExceeded(count, nodes)
        for a in range(p - 1, start - 1, -1):
            if (reach >> (p - a)) & 1:
                continue
            stack.append((a + 1, reach | _bits.rotl(reach | 1, a, p, mask), size + 1))
    return ZsfReport(p, count, best, nodes)


def distinct_partition_counts(n: int) -> list[int]:
    """q(0), ..., q(n): partitions into distinct parts (0/1 knapsack over parts)."""
    q = [0] * (n + 1)
    q[0] = 1
    for part in range(1, n + 1):
        for s in range(n, part - 1, -1):
            q[s] += q[s - part]
    return q


def n_small_count(n: int) -> int:
    """Number of finite sets of distinct positive integers with sum < n."""
    if n < 1:
        raise PreconditionError("n must be positive")
    return sum(distinct_partition_counts(n - 1))


def n_small_exponent(n: int) -> float:
    """log2(n_small_count(n)) / sqrt(n)."""
    return math.log2(n_small_count(n)) / math.sqrt(n)


def interval_small_sets(p: int) -> int:
    """Count of subsets of [1, k], k = floor(sqrt(2p) - 1), with sum < p.

    Each of them is zero-sum-free mod p, so this lower-bounds count_zero_sum_free(p).
    """
    k = max(0, int(math.floor(math.sqrt(2 * p) - 1)))

    @lru_cache(maxsize=None)
    def ways(i, s):
        # subsets of [1, i] with sum < s
        if s <= 0:
            return 0
        if i == 0:
            return 1
        return ways(i - 1, s) + ways(i - 1, s - i)

    return ways(k, p)
