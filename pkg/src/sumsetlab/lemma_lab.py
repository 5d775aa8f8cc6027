"""Representation counts, multiplicity bucketing, the big-distinct-sum greedy and
disjoint pair covers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _bits
from .core import IntSet
from .errors import PreconditionError

GROWTH = 1.1


# -- representation counts --------------------------------------------------

@dataclass(frozen=True)
class RepCounts:
    """r(x) = #{{a, b} ⊂ A : a != b, a + b = x}, stored densely for 0 <= x <= len - 1."""

    counts: np.ndarray
    size: int    # |A|

    def __getitem__(self, x: int) -> int:
        return int(self.counts[x]) if 0 <= x < self.counts.size else 0

    def total(self) -> int:
        return int(self.counts.sum())

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    def as_dict(self) -> dict[int, int]:
        idx = self.support()
        return dict(zip(idx.tolist(), self.counts[idx].tolist()))


def pair_representation_counts(A: IntSet) -> RepCounts:
    """Counting convolution of A with itself, diagonal removed, halved."""
    k = len(A)
    if k == 0:
        return RepCounts(np.zeros(1, dtype=np.int64), 0)
    x = A.members
    top = int(x[-1])
    if k * k <= 4 * (top + 1) or k <= 64:
        sums = (x[:, None] + x[None, :])[np.triu_indices(k, 1)]
        counts = np.bincount(sums, minlength=2 * top + 1).astype(np.int64)
        return RepCounts(counts, k)
    ind = np.zeros(top + 1, dtype=np.float64)
    ind[x] = 1.0
    try:
        full = _bits.fft_counts(ind, ind)
    except (ArithmeticError, MemoryError):
        full = np.zeros(2 * top + 1, dtype=np.int64)
        for start in range(0, k, 1024):
            blk = x[start:start + 1024]
            full += np.bincount((blk[:, None] + x[None, :]).ravel(), minlength=2 * top + 1)
    full[2 * x] -= 1
    return RepCounts(full // 2, k)


# -- bucketing --------------------------------------------------------------

@dataclass(frozen=True)
class Bucket:
    """Elements x with lo <= r(x) < hi."""

    i: int
    lo: float
    hi: float
    members: IntSet


@dataclass(frozen=True)
class BucketReport:
    scheme: str
    buckets: list
    chosen: dict | None
    info: dict = field(default_factory=dict)

    def bucket(self, i: int) -> Bucket:
        for b in self.buckets:
            if b.i == i:
                return b
        raise KeyError(i)


def _bucket(r, idx, i, lo, hi, bound):
    sel = idx[(r[idx] >= lo) & (r[idx] < hi)]
    return Bucket(i, lo, hi, IntSet(sel, bound=bound))


def multiplicity_buckets(A: IntSet, scheme: str = "harmonic", alpha: float = 4,
                         n: int | None = None) -> BucketReport:
    """Group sums by representation count.

    harmonic: m_i = |A| / (2^i i), S_i = {m_(i+1) <= r < m_i} for
    1 <= i <= min(log2 |A|, (alpha + 2) log2 log2 n); bucket 0 holds r >= m_1
    and bucket -1 the tail below the last threshold.  The chosen index is the
    smallest i with |S_i| > (2^i / 4i)|A|, with l1 = |A| / ((i+1) 2^(i+1)) and
    t = 2^(i+1).

    dyadic: m_i = 2^i, S_i = {m_i <= r < m_(i+1)} for 0 <= i <= t, t the
    smallest index with m_t >= |A|/2; each bucket is classified against
    q/(4t) mass and |A|/40 size, q = |A|^2 / 5.
    """
    k = len(A)
    if k < 16:
        raise PreconditionError("bucketing needs |A| >= 16")
    rc = pair_representation_counts(A)
    r = rc.counts
    idx = rc.support()
    bound = max(0, r.size - 1)
    if scheme == "harmonic":
        return _harmonic(k, r, idx, bound, alpha, n if n is not None else A.max())
    if scheme == "dyadic":
        return _dyadic(k, r, idx, bound)
    raise ValueError(f"unknown scheme {scheme!r}")


def _harmonic(k, r, idx, bound, alpha, n):
    top_i = int(math.floor(math.log2(k)))
    if n > 2:
        cap = int(math.floor((alpha + 2) * math.log2(math.log2(n))))
        top_i = max(1, min(top_i, cap))
    m = {i: k / (2 ** i * i) for i in range(1, top_i + 2)}
    buckets = [_bucket(r, idx, 0, m[1], k // 2 + 1, bound)]
    for i in range(1, top_i + 1):
        buckets.append(_bucket(r, idx, i, m[i + 1], m[i], bound))
    buckets.append(_bucket(r, idx, -1, 1, m[top_i + 1], bound))
    chosen = None
    for b in buckets[1:-1]:
        i = b.i
        if len(b.members) > 2 ** i / (4 * i) * k:
            chosen = {"i": i, "B": b.members, "l1": k / ((i + 1) * 2 ** (i + 1)), "t": 2 ** (i + 1)}
            break
    return BucketReport("harmonic", buckets, chosen, {"index_cap": top_i, "alpha": alpha, "n": n})


def _dyadic(k, r, idx, bound):
    t = 0
    while 2 ** t < k / 2:
        t += 1
    q = k * k / 5
    buckets = [_bucket(r, idx, i, 2 ** i, 2 ** (i + 1), bound) for i in range(0, t + 1)]
    parts = []
    for b in buckets:
        mass = b.lo * len(b.members)
        small_mass = mass <= q / (4 * t) if t else True
        small_size = len(b.members) <= k / 40
        parts.append({"i": b.i, "mass": mass, "small_mass": small_mass, "small_size": small_size,
                      "third": not (small_mass or small_size)})
    third = [p["i"] for p in parts if p["third"]]
    total_mass = sum(b.lo * len(b.members) for b in buckets if b.i >= 1)
    info = {"t": t, "q": q, "parts": parts, "mass_i_ge_1": total_mass,
            "third_mass": sum(p["mass"] for p in parts if p["third"])}
    chosen = {"third_part": third} if third else None
    return BucketReport("dyadic", buckets, chosen, info)


# -- greedy subset with a big distinct-summand sum set ----------------------

class GreedyStuck(RuntimeError):
    def __init__(self, state):
        super().__init__(f"no pair gives {GROWTH}x growth at step i = {state['i']} "
                         f"(|i*B| = {state['size']}, |B| = {len(state['B'])})")
        self.state = state


@dataclass(frozen=True)
class GreedyResult:
    B: list
    T: int
    sums: IntSet            # T*B
    card: int               # |A|
    precondition_met: bool  # |A| >= 100 log2 |A|
    steps: list             # |i*B| after each step

    @property
    def size_ok(self) -> bool:
        return len(self.B) <= 20 * math.log2(self.card)

    @property
    def sum_ok(self) -> bool:
        return len(self.sums) >= self.card


def greedy_big_sum_subset(A: IntSet) -> GreedyResult:
    """Pairs added greedily so each step multiplies |i*B| by at least 1.1.

    Start from the two smallest elements; at each step take a = smallest unused
    element and the first a' > a (scanning upward) meeting the growth rule.
    Stops at T with |T*B| >= |A|.  A pair that fails to grow raises
    GreedyStuck carrying the state.
    """
    elems = A.tolist()
    k = len(elems)
    if k < 2:
        raise PreconditionError("need |A| >= 2")
    pre = k >= 100 * math.log2(k)
    # sizes grow from 2 by 1.1 per step, so only layers up to J are ever read
    J = int(math.ceil(math.log(max(k, 2) / 2, GROWTH))) + 3
    B = elems[:2]
    unused = elems[2:]
    layers = [1, (1 << B[0]) | (1 << B[1]), 1 << (B[0] + B[1])] + [0] * (J - 2)
    i = 1
    size = layers[1].bit_count()
    steps = [size]
    while size < k:
        if i + 2 > J or len(unused) < 2:
            raise GreedyStuck({"i": i, "size": size, "B": list(B)})
        s_lo, s_mid, s_hi = layers[i - 1], layers[i], layers[i + 1]
        need = GROWTH * size
        a = unused[0]
        base = s_hi | (s_mid << a)
        pick = None
        for a2 in unused[1:]:
            cand = base | (s_mid << a2) | (s_lo << (a + a2))
            c = cand.bit_count()
            if c >= need:
                pick = (a2, c)
                break
        if pick is None:
            raise GreedyStuck({"i": i, "size": size, "B": list(B)})
        a2, c = pick
        unused.remove(a)
        unused.remove(a2)
        B += [a, a2]
        for x in (a, a2):
            for j in range(J, 0, -1):
                layers[j] |= layers[j - 1] << x
        i += 1
        size = c
        steps.append(size)
    return GreedyResult(B, i, IntSet.from_bits(layers[i], i * A.bound), k, pre, steps)


# -- disjoint pairs ---------------------------------------------------------

@dataclass(frozen=True)
class PairCover:
    pairs: list
    k: int

    @property
    def shortfall(self) -> bool:
        return len(self.pairs) < self.k


def disjoint_pair_cover(A: IntSet, targets: IntSet, k: int) -> PairCover:
    """Up to k pairwise-disjoint pairs a < b of A with a + b a target.

    Targets are served by descending r(x), then ascending x; within a target,
    pairs are taken by smallest available element.
    """
    members = A.tolist()
    inA = set(members)
    rc = pair_representation_counts(A)
    tl = targets.tolist()
    missing = [x for x in tl if rc[x] == 0]
    if missing:
        raise PreconditionError(f"targets without a representation: {missing[:10]}")
    order = sorted(tl, key=lambda x: (-rc[x], x))
    used = set()
    pairs = []
    for x in order:
        for a in members:
            if 2 * a >= x or len(pairs) >= k:
                break
            b = x - a
            if b in inA and a not in used and b not in used:
                used.update((a, b))
                pairs.append((a, b))
        if len(pairs) >= k:
            break
    return PairCover(pairs, k)
