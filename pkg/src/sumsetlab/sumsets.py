"""Sum engines: lA, l*A (distinct summands), star sums and subset sums."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import _bits, _engine
from .core import IntSet, ResidueSet, SeqPrefix
from .errors import CapExceeded, PreconditionError

STAR_L_MAX = 8
STAR_WORK_CAP = 10**8
LAYER_MEMORY_BITS = 1 << 33


@dataclass(frozen=True)
class SumCap:
    max_universe: int = 1 << 31
    modulus: int | None = None

    def __post_init__(self):
        if self.modulus is not None and self.modulus < 2:
            raise ValueError("modulus must be at least 2")


DEFAULT_CAP = SumCap()


def _residue_bits(A, n):
    if isinstance(A, ResidueSet):
        if A.modulus != n:
            raise PreconditionError(f"residue set is mod {A.modulus}, cap says mod {n}")
        return A.bits
    return ResidueSet.of(A, n).bits


def _check_universe(size, cap):
    if size > cap.max_universe:
        raise CapExceeded(f"universe {size} exceeds cap {cap.max_universe}")


def iterated_sumset(A, l: int, cap: SumCap = DEFAULT_CAP):
    """lA by binary doubling. With ``cap.modulus`` the result is a ResidueSet."""
    if l < 1:
        raise PreconditionError("l must be at least 1")
    if cap.modulus is not None:
        n = cap.modulus
        mask_bits = _residue_bits(A, n)
        result, piece = None, mask_bits
        while True:
            if l & 1:
                result = piece if result is None else _engine.add_mod(result, piece, n)
            l >>= 1
            if not l:
                break
            piece = _engine.add_mod(piece, piece, n)
        return ResidueSet(n, result)
    bound = l * A.bound
    _check_universe(bound, cap)
    if not A.bits:
        return IntSet.from_bits(0, bound)
    result, piece = None, A._packed()
    while True:
        if l & 1:
            result = piece if result is None else _engine.add(result, piece)
        l >>= 1
        if not l:
            break
        piece = _engine.add(piece, piece)
    return IntSet.from_bits(result.bits, bound)


def distinct_sumset(A, l: int, cap: SumCap = DEFAULT_CAP):
    """l*A: sums of l pairwise-distinct elements, by a layered reachability DP."""
    members = sorted(A.members if isinstance(A, ResidueSet) else A.tolist())
    k = len(members)
    if not 1 <= l <= k:
        raise PreconditionError(f"need 1 <= l <= |A| = {k}, got l = {l}")
    if cap.modulus is not None:
        n = cap.modulus
        mask = (1 << n) - 1
        width = n
    else:
        n = None
        width = l * A.bound + 1
        _check_universe(width - 1, cap)
    if (l + 1) * width > LAYER_MEMORY_BITS:
        raise CapExceeded(f"{l + 1} layers of width {width} exceed the layer memory cap")
    layers = [1] + [0] * l
    for t, a in enumerate(members):
        # layer j is useless once the remaining elements cannot lift it to l
        lo = max(1, l - (k - t - 1))
        for j in range(min(l, t + 1), lo - 1, -1):
            prev = layers[j - 1]
            if prev:
                shifted = _bits.rotl(prev, a, n, mask) if n else prev << a
                layers[j] |= shifted
    if n:
        return ResidueSet(n, layers[l])
    return IntSet.from_bits(layers[l], l * A.bound)


def star_sum(sets, cap: SumCap = DEFAULT_CAP, *, l_max: int = STAR_L_MAX,
             work_cap: int = STAR_WORK_CAP) -> IntSet:
    """Exact star sum {a_1 + ... + a_l : a_i in A_i, a_i pairwise distinct}.

    The search runs level by level over the sets (smallest first).  A partial
    choice is remembered only through its sum and the chosen values that can
    still collide with a later set, which keeps it exact.
    """
    sets = list(sets)
    l = len(sets)
    if l == 0:
        raise PreconditionError("star sum of no sets")
    if l > l_max:
        raise CapExceeded(f"{l} sets exceed star_l_max = {l_max}; use star_sum_sample")
    work = 1
    for s in sets:
        work *= len(s)
    if work > work_cap:
        raise CapExceeded(f"product of sizes {work} exceeds star_work_cap = {work_cap}; "
                          "use star_sum_sample for a lower-bound certificate")
    bound = sum(s.bound for s in sets)
    _check_universe(bound, cap)
    if any(len(s) == 0 for s in sets):
        return IntSet.from_bits(0, bound)
    order = sorted(range(l), key=lambda i: (len(sets[i]), i))
    masks = [sets[i].bits for i in order]
    lists = [sets[i].tolist() for i in order]
    # values relevant to collisions with sets still to come
    future = [0] * l
    acc = 0
    for k in range(l - 1, -1, -1):
        future[k] = acc
        acc |= masks[k]
    states = {(0, 0)}
    for k in range(l - 1):
        nxt = set()
        keep = future[k]
        for s, used in states:
            for a in lists[k]:
                if not (used >> a) & 1:
                    nxt.add((s + a, (used | (1 << a)) & keep))
        states = nxt
    by_used = {}
    for s, used in states:
        by_used.setdefault(used, []).append(s)
    last = masks[-1]
    out = 0
    for used, sums in by_used.items():
        avail = last & ~used
        for s in sums:
            out |= avail << s
    if cap.modulus is not None:
        n = cap.modulus
        red = 0
        for v in _bits.bits_to_indices(out, bound).tolist():
            red |= 1 << (v % n)
        return ResidueSet(n, red)
    return IntSet.from_bits(out, bound)


@dataclass(frozen=True)
class StarSample:
    """Subset of a star sum found by random sampling: a lower-bound certificate only."""

    sums: IntSet
    samples: int
    lower_bound: bool = True


def star_sum_sample(sets, samples: int, seed: int = 0, max_tries: int | None = None) -> StarSample:
    """Uniform random distinct choices (rejection sampling), deduplicated."""
    sets = list(sets)
    rng = np.random.default_rng(seed)
    arrays = [s.members for s in sets]
    bound = sum(s.bound for s in sets)
    if any(len(a) == 0 for a in arrays):
        return StarSample(IntSet.from_bits(0, bound), 0)
    tries = max_tries if max_tries is not None else 20 * samples
    got = 0
    out = 0
    for _ in range(tries):
        if got >= samples:
            break
        pick = [int(a[rng.integers(len(a))]) for a in arrays]
        if len(set(pick)) == len(pick):
            out |= 1 << sum(pick)
            got += 1
    return StarSample(IntSet.from_bits(out, bound), got)


def subset_sums(A, cap: SumCap = DEFAULT_CAP):
    """S_A, including 0 for the empty subset; multisets use bounded-multiplicity knapsack."""
    if isinstance(A, SeqPrefix):
        counts = Counter(A.elements)
    elif isinstance(A, IntSet):
        counts = Counter(A.tolist())
    else:
        counts = Counter(int(x) for x in A)
    if any(v < 0 for v in counts):
        raise PreconditionError("subset sums need non-negative elements")
    total = sum(v * c for v, c in counts.items())
    if cap.modulus is not None:
        n = cap.modulus
        mask = (1 << n) - 1
        bits = 1
        for v, c in counts.items():
            for _ in range(min(c, n)):
                bits |= _bits.rotl(bits, v, n, mask)
        return ResidueSet(n, bits)
    _check_universe(total, cap)
    bits = 1
    for v in sorted(counts):
        c = counts[v]
        step = 1
        while c > 0:
            t = min(step, c)
            bits |= bits << (v * t)
            c -= t
            step <<= 1
    return IntSet.from_bits(bits, total)
