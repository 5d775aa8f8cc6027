"""Subset sums of sequences: obstructions, nets, gap bounds, gluing of two
progressions and the good-partition probe.

Sequences here are finite prefixes; every statement about limits or
"arbitrarily long" progressions is reported as a finite-prefix proxy with the
prefix length attached.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .core import IntSet, SeqPrefix
from .errors import CapExceeded, PreconditionError
from .gap import Gap, gap_enumerate
from .structure import ApRun, longest_ap
from .sumsets import DEFAULT_CAP, SumCap, subset_sums

GLUE_ENUM_CAP = 10**6


@dataclass(frozen=True)
class NetParams:
    d: int
    L: int

    def __post_init__(self):
        if self.d < 1 or self.L < 1:
            raise ValueError("need d >= 1 and L >= 1")


@dataclass(frozen=True)
class ObstructionReport:
    prefix_length: int
    tail_from: int
    g: list             # g_i = a_i - sum_{j<i} a_j for i >= tail_from (1-based)
    max_g: int
    increasing: bool    # strictly increasing on the tail

    @property
    def obstructed(self) -> bool:
        """Finite-prefix proxy for limsup g_i = infinity."""
        return self.increasing and len(self.g) >= 2


def erdos_obstruction(A: SeqPrefix, tail_from: int = 1) -> ObstructionReport:
    n = len(A)
    if not 1 <= tail_from <= n:
        raise PreconditionError(f"tail_from must lie in [1, {n}]")
    g = []
    acc = 0
    for i, a in enumerate(A.elements, 1):
        if i >= tail_from:
            g.append(a - acc)
        acc += a
    inc = all(x < y for x, y in zip(g, g[1:]))
    return ObstructionReport(n, tail_from, g, max(g), inc)


@dataclass(frozen=True)
class GrahamReport:
    prefix_length: int
    m0: int
    hypothesis: bool
    first_failure: int | None   # first m >= m0 with y_{m+1} > sum_{i<=m} y_i
    total: int
    window: tuple[int, int]     # middle half of [0, total]
    L: int | None               # max consecutive gap of S_Y inside the window


def graham_gap_check(Y: SeqPrefix, m0: int = 1, cap: SumCap = DEFAULT_CAP) -> GrahamReport:
    """y_{m+1} <= y_1 + ... + y_m for m >= m0, and the largest gap of S_Y on the middle half."""
    ys = Y.elements
    acc = 0
    fail = None
    for m in range(1, len(ys)):
        acc += ys[m - 1]
        if m >= m0 and ys[m] > acc and fail is None:
            fail = m
    S = subset_sums(Y, cap)
    total = Y.total()
    lo, hi = total // 4, (3 * total) // 4
    x = S.members
    x = x[(x >= lo) & (x <= hi)]
    L = int(np.max(np.diff(x))) if x.size >= 2 else None
    return GrahamReport(len(ys), m0, fail is None, fail, total, (lo, hi), L)


def is_dL_net(B: IntSet, params: NetParams) -> bool:
    x = B.members
    if x.size < 2:
        raise PreconditionError("a net needs at least two elements")
    gaps = np.diff(x)
    return bool(np.all(gaps < params.L) and np.all(gaps % params.d == 0))


# -- gluing -----------------------------------------------------------------

def _member_rank2(N, a1, a2, l1, l2, inv):
    """Is N = x1 a1 + x2 a2 with 0 <= x_i <= l_i?  a1, a2 coprime, O(1)."""
    if N < 0:
        return False
    x2 = (N * inv) % a1 if a1 > 1 else 0
    if x2 > l2:
        return False
    rest = N - x2 * a2
    if rest < 0:
        return False
    x1 = rest // a1
    if x1 <= l1:
        return True
    k = -(-(x1 - l1) // a2)
    return x2 + k * a1 <= l2


def glue_gap2_to_ap(P: Gap, verify: bool = True) -> ApRun:
    """AP of difference gcd(a1, a2) and length >= l1 + l2 inside P = {x1 a1 + x2 a2}.

    Requires a1, a2 > 0, l1 >= 5 a2 and l2 >= 5 a1.  After dividing by
    g = gcd, every integer in [(a1-1) a2, (l2 - a1 + 1) a2 + l1 a1] is
    representable (consecutive residue classes of x2 overlap since l1 >= a2);
    the run is then extended both ways with an exact membership test.
    """
    if P.rank != 2:
        raise PreconditionError("gluing needs a rank-2 GAP")
    a1, a2 = P.diffs
    l1, l2 = P.lengths
    if a1 <= 0 or a2 <= 0:
        raise PreconditionError("gluing needs positive differences")
    if l1 < 5 * a2 or l2 < 5 * a1:
        raise PreconditionError(f"hypothesis l1 >= 5 a2, l2 >= 5 a1 unmet: l = {P.lengths}, a = {P.diffs}")
    g = gcd(a1, a2)
    b1, b2 = a1 // g, a2 // g
    inv = pow(b2, -1, b1) if b1 > 1 else 0
    lo = (b1 - 1) * b2
    hi = (l2 - b1 + 1) * b2 + l1 * b1
    top = l1 * b1 + l2 * b2
    while lo > 0 and _member_rank2(lo - 1, b1, b2, l1, l2, inv):
        lo -= 1
    while hi < top and _member_rank2(hi + 1, b1, b2, l1, l2, inv):
        hi += 1
    run = ApRun(P.base + g * lo, g, hi - lo + 1)
    if verify:
        _verify_run(run, P)
    return run


def _verify_run(run, P):
    if P.box_size <= GLUE_ENUM_CAP and P.min_value >= 0:
        img = gap_enumerate(P)
        ok = all(t in img for t in run.terms())
    else:
        a1, a2 = P.diffs
        g = gcd(a1, a2)
        b1, b2 = a1 // g, a2 // g
        inv = pow(b2, -1, b1) if b1 > 1 else 0
        ok = all((t - P.base) % g == 0 and
                 _member_rank2((t - P.base) // g, b1, b2, *P.lengths, inv) for t in run.terms())
    if not ok:
        raise AssertionError(f"glued progression {run} escapes {P}")


# -- progressions in subset sums --------------------------------------------

@dataclass(frozen=True)
class SubsetSumAp:
    n: int
    size: int           # |S_A|
    ap: ApRun

    @property
    def reaches(self) -> bool:
        return self.ap.length >= self.n


def ap_in_subset_sums(A, n: int, cap: SumCap = DEFAULT_CAP) -> SubsetSumAp:
    S = subset_sums(A, cap)
    return SubsetSumAp(n, len(S), longest_ap(S))


# -- good partition probe ---------------------------------------------------

@dataclass
class GoodPartitionReport:
    prefix_length: int
    depth: int
    stage: str = "start"
    a2_margins: list = field(default_factory=list)
    a2_ok: bool | None = None
    m: int | None = None
    blocks: list = field(default_factory=list)
    chain: list = field(default_factory=list)     # (difference, length) per glued stage
    stabilized_diff: int | None = None
    longest: ApRun | None = None
    note: str = "finite-prefix proxy"

    def to_json(self) -> dict:
        return {
            "prefix_length": self.prefix_length, "depth": self.depth, "stage": self.stage,
            "a2_ok": self.a2_ok, "a2_min_tail_margin": min(self.a2_margins) if self.a2_margins else None,
            "m": self.m, "blocks": self.blocks, "chain": [list(c) for c in self.chain],
            "stabilized_diff": self.stabilized_diff,
            "longest": self.longest.to_json() if self.longest else None, "note": self.note,
        }


def good_partition_probe(A: SeqPrefix, depth: int, m: int | None = None,
                         cap: SumCap = DEFAULT_CAP) -> GoodPartitionReport:
    """Odd/even split, tail-margin check on the even part, dyadic blocks of the
    odd part, one progression per block from its subset sums, then gluing.

    The stage field names the last stage reached ("complete" when all ran).
    """
    els = A.elements
    rep = GoodPartitionReport(len(els), depth)
    odd = list(els[0::2])
    even = list(els[1::2])
    # margin_i = b_1 + ... + b_(i-1) - b_i over the second half of A''
    acc = 0
    margins = []
    for i, b in enumerate(even):
        if i >= len(even) // 2:
            margins.append(acc - b)
        acc += b
    rep.a2_margins = margins
    rep.a2_ok = bool(margins) and min(margins) > 0 and margins[-1] > margins[0]
    rep.stage = "split"
    if m is None:
        m = len(odd) >> depth
    if m < 1 or (m << depth) > len(odd):
        rep.stage = "blocks: prefix too short for the requested depth"
        return rep
    rep.m = m
    blocks = [odd[:m]] + [odd[(m << (i - 1)):(m << i)] for i in range(1, depth + 1)]
    runs = []
    for i, blk in enumerate(blocks):
        try:
            res = ap_in_subset_sums(SeqPrefix(tuple(blk)), len(blk), cap)
        except CapExceeded as e:
            rep.stage = f"block {i}: {e}"
            return rep
        runs.append(res.ap)
        rep.blocks.append({"i": i, "size": len(blk), "sum": sum(blk), "ap": res.ap.to_json()})
    rep.stage = "blocks"
    Q = runs[0]
    rep.chain.append((Q.diff, Q.length))
    for i, Pi in enumerate(runs[1:], 1):
        if Q.length < 2 or Pi.length < 2:
            rep.stage = f"glue {i}: degenerate progression"
            return rep
        G = Gap(Q.start + Pi.start, (Q.diff, Pi.diff), (Q.length - 1, Pi.length - 1))
        try:
            Q = glue_gap2_to_ap(G)
        except PreconditionError as e:
            rep.stage = f"glue {i}: {e}"
            return rep
        rep.chain.append((Q.diff, Q.length))
    rep.stabilized_diff = rep.chain[-1][0]
    rep.longest = Q
    rep.stage = "complete"
    return rep
