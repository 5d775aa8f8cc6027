"""Finders and probes: longest AP, proper GAP search, doubling profile, covering
and filling checks.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from . import _bits, _engine
from .core import IntSet, ResidueSet
from .errors import CapExceeded, PreconditionError
from .gap import (
    ENUM_CAP, Gap, find_vanishing_vector, gap_enumerate, gap_is_proper,
    gap_scale, verify_gap_in_set,
)
from .sumsets import SumCap, iterated_sumset

TOP_DIFFS = 64
DEFAULT_BUDGET = 5_000_000
_FFT_SPAN = 1 << 25
_FALLBACK_DIFFS = 4096
_DENSE_LOOKUP = 1 << 24
RANK2_MAX_POINTS = 1 << 23


@dataclass(frozen=True)
class ApRun:
    start: int
    diff: int
    length: int

    def __post_init__(self):
        if self.length < 1 or self.diff < 1:
            raise ValueError("an ApRun needs length >= 1 and diff >= 1")

    def terms(self, modulus: int | None = None) -> list[int]:
        t = [self.start + k * self.diff for k in range(self.length)]
        return [x % modulus for x in t] if modulus else t

    def contained_in(self, S) -> bool:
        modulus = S.modulus if isinstance(S, ResidueSet) else None
        return all(x in S for x in self.terms(modulus))

    def as_gap(self) -> Gap:
        return Gap(self.start, (self.diff,), (self.length - 1,))

    def to_json(self) -> dict:
        return {"start": self.start, "diff": self.diff, "len": self.length}


# -- longest AP -------------------------------------------------------------

def _autocorr(bits, span):
    """c[d] = |S ∩ (S - d)| for 0 <= d <= span, or None if too large for an FFT."""
    if span + 1 > _FFT_SPAN:
        return None
    ind = _bits.bits_to_bool(bits, span).astype(np.float64)
    conv = _bits.fft_counts(ind, ind[::-1])
    return conv[span:]


_PAIR_DIFFS = 4_000_000
_LAZY_HEAD = 16


def _pair_difference_counts(x, lo_d, hi_d):
    """Sorted (d, #pairs at distance d) over the positive pairwise differences of x."""
    i, j = np.triu_indices(x.size, 1)
    diff = x[j] - x[i]
    diff = diff[(diff >= lo_d) & (diff <= hi_d)]
    return np.unique(diff, return_counts=True)


def _difference_counts(S, lo_d, hi_d):
    """Yield (d, |S ∩ (S - d)|) for lo_d <= d <= hi_d with a nonzero count, d ascending.

    A count may come as None (not yet computed); see _count.
    """
    k = len(S)
    lo = S.min()
    span = S.max() - lo
    if hi_d < lo_d:
        return
    if k * (k - 1) // 2 <= min(_PAIR_DIFFS, span):
        ds, cs = _pair_difference_counts(S.members - lo, lo_d, hi_d)
        yield from zip(ds.tolist(), cs.tolist())
        return
    bits = S.bits >> lo
    # the first few differences with a lazy count (None): a near-interval is
    # settled before any FFT or full popcount
    head = min(hi_d, lo_d + _LAZY_HEAD - 1)
    for d in range(lo_d, head + 1):
        yield d, None
    lo_d = head + 1
    if lo_d > hi_d:
        return
    corr = _autocorr(bits, span)
    if corr is not None:
        seg = corr[lo_d:hi_d + 1]
        nz = np.flatnonzero(seg > 0.5)
        yield from zip((nz + lo_d).tolist(), np.rint(seg[nz]).astype(np.int64).tolist())
        return
    for d in range(lo_d, hi_d + 1):
        c = (bits & (bits >> d)).bit_count()
        if c:
            yield d, c


def _count(bits, d, c):
    return (bits & (bits >> d)).bit_count() if c is None else c


def _longest_run(bits, span):
    """(length, smallest start) of the longest run of consecutive members."""
    st, en = _engine.bits_to_runs(bits, span)
    ln = en - st + 1
    j = int(np.argmax(ln))
    return int(ln[j]), int(st[j])


def _longest_for_diff(bits, d, shift_fn, cap_len=None):
    """(length, smallest start) of the longest d-progression inside ``bits``."""
    levels = [bits]
    k = 0
    while cap_len is None or (1 << (k + 1)) <= cap_len:
        nxt = levels[-1] & shift_fn(levels[-1], d << k)
        if not nxt:
            break
        levels.append(nxt)
        k += 1
    cur = levels[-1]
    length = 1 << (len(levels) - 1)
    for j in range(len(levels) - 2, -1, -1):
        if cap_len is not None and length + (1 << j) > cap_len:
            continue
        cand = cur & shift_fn(levels[j], d * length)
        if cand:
            cur = cand
            length += 1 << j
    return length, (cur & -cur).bit_length() - 1


def longest_ap(S, modulus: int | None = None, min_diff: int = 1,
               max_diff: int | None = None, work_cap: int | None = None) -> ApRun:
    """Longest AP inside S; ties go to the smallest difference, then the smallest start.

    With ``modulus`` (or a ResidueSet input) progressions live in Z_n and may
    wrap; their length is capped by the order of the difference.
    ``work_cap`` bounds the estimated work (64-bit word operations or pair
    steps) of the search; exceeding it raises CapExceeded.

    >>> longest_ap(IntSet(range(1, 11)))
    ApRun(start=1, diff=1, length=10)
    """
    if isinstance(S, ResidueSet):
        modulus = S.modulus if modulus is None else modulus
        if modulus != S.modulus:
            raise PreconditionError("modulus disagrees with the residue set")
        return _longest_ap_mod(S.bits, modulus, min_diff, max_diff, work_cap)
    if modulus is not None:
        return _longest_ap_mod(ResidueSet.of(S.tolist(), modulus).bits, modulus, min_diff, max_diff,
                               work_cap)
    if not S.bits:
        raise PreconditionError("longest_ap of an empty set")
    lo, hi = S.min(), S.max()
    bits = S.bits >> lo
    span = hi - lo
    top = span if max_diff is None else min(span, max_diff)
    k = len(S)
    npairs = k * (k - 1) // 2
    if npairs <= _PAIR_METHOD_MAX and span >= 8 * k:
        if work_cap is not None and npairs > work_cap:
            raise CapExceeded(f"longest_ap: {npairs} pairs exceed work cap {work_cap}")
        return _longest_ap_pairs(S.members - lo, lo, max(1, min_diff), top, min_diff)
    length, d, start = _scan(bits, max(1, min_diff), top, span=span, min_diff=min_diff,
                             work_cap=work_cap)
    return ApRun(start + lo, d, length)


_MULTIPLES = 32


def _multiples_filter(corr, ds, L, n=None):
    """Keep d that could carry an AP of length L + 1: c(k d) >= L + 1 - k for k <= min(L, 32)."""
    size = corr.size
    keep = np.ones(ds.size, dtype=bool)
    for k in range(1, min(L, _MULTIPLES) + 1):
        idx = k * ds
        if n is not None:
            idx %= n
            vals = corr[idx]
        else:
            inside = idx < size
            vals = np.zeros(ds.size, dtype=corr.dtype)
            vals[inside] = corr[idx[inside]]
        keep &= vals >= L + 1 - k
        ds, keep = ds[keep], np.ones(int(keep.sum()), dtype=bool)
        if not ds.size:
            break
    return ds


def _multiples_ok(corr, d, L, n=None):
    """Scalar form of _multiples_filter for one difference."""
    for k in range(1, min(L, _MULTIPLES) + 1):
        idx = (k * d) % n if n is not None else k * d
        c = corr[idx] if idx < corr.size else 0
        if c < L + 1 - k:
            return False
    return True


def _scan(bits, lo_d, top, *, span=None, n=None, min_diff=1, first=0, work_cap=None):
    """Difference loop shared by the integer and cyclic bit routes.

    The first few differences are tried directly; the rest are screened with
    the autocorrelation c(d) = |S ∩ (S - d)| and its multiples before the
    exact doubling search.  Returns (length, diff, start).
    """
    cyclic = n is not None
    if cyclic:
        mask = (1 << n) - 1
        shr = lambda x, k: _bits.rotl(x, -k, n, mask)
        words = n // 64 + 1
    else:
        shr = lambda x, k: x >> k
        words = span // 64 + 1
    best = [1, min_diff, first]
    work = 0

    def limit(d):
        # longest possible AP of difference d
        return n // gcd(d, n) if cyclic else span // d + 1

    def mirrored(d):
        # in Z_n, difference n - d gives the same progressions reversed
        return cyclic and d > n - d >= lo_d and n - d <= top

    def charge(w, d):
        nonlocal work
        work += w
        if work_cap is not None and work > work_cap:
            raise CapExceeded(f"longest_ap: work cap {work_cap} exhausted at difference {d} "
                              f"(best so far length {best[0]}, diff {best[1]})")

    def count(d):
        charge(2 * words, d)
        return (bits & shr(bits, d)).bit_count()

    def attempt(d):
        if cyclic:
            length, st = _longest_for_diff(bits, d, shr, cap_len=limit(d))
        elif d == 1:
            length, st = _longest_run(bits, span)
        else:
            length, st = _longest_for_diff(bits, d, shr)
        if length > best[0]:
            best[:] = [length, d, st]
        charge(2 * words * (length.bit_length() + 1), d)

    head = min(top, lo_d + _LAZY_HEAD - 1)
    for d in range(lo_d, head + 1):
        if limit(d) <= best[0]:
            if cyclic:
                continue
            return tuple(best)
        if mirrored(d):
            continue
        if (cyclic or d > 1) and count(d) < best[0]:
            continue
        attempt(d)
    if head >= top:
        return tuple(best)
    size = n if cyclic else span
    corr = None
    if size + 1 <= _FFT_SPAN:
        if cyclic:
            ind = _bits.bits_to_bool(bits, n - 1).astype(np.float64)
            corr = np.roll(_bits.cyclic_fft_counts(ind, ind[::-1], n), -(n - 1))
        else:
            corr = _autocorr(bits, span)
    if corr is None:
        for d in range(head + 1, top + 1):
            if limit(d) <= best[0]:
                if cyclic:
                    continue
                break
            if mirrored(d) or count(d) < best[0]:
                continue
            attempt(d)
        return tuple(best)
    hi = top if cyclic else min(top, span // best[0])
    ds = np.arange(head + 1, hi + 1)
    ds = ds[corr[ds] >= best[0]]
    if cyclic:
        mirror = n - ds
        ds = ds[~((ds > mirror) & (mirror >= lo_d) & (mirror <= top))]
    ds = _multiples_filter(corr, ds, best[0], n)
    for d in ds.tolist():
        L = best[0]
        if limit(d) <= L:
            if cyclic:
                continue
            break
        if not _multiples_ok(corr, d, L, n):
            continue
        attempt(d)
    return tuple(best)


_PAIR_METHOD_MAX = 300_000_000
_PAIR_CHUNK = 1 << 21


def _longest_ap_pairs(x, lo, lo_d, hi_d, min_diff):
    """Sparse route: extend every start pair (x_i, x_j), x_i - d not in S, forward."""
    k = x.size
    span = int(x[-1])
    if span + 1 <= 1 << 27:
        ind = np.zeros(span + 1, dtype=bool)
        ind[x] = True

        def member(pos):
            out = np.zeros(pos.size, dtype=bool)
            ok = (pos >= 0) & (pos <= span)
            out[ok] = ind[pos[ok]]
            return out
    else:
        def member(pos):
            idx = np.minimum(np.searchsorted(x, pos), k - 1)
            return x[idx] == pos
    best = (1, -min_diff, 0)
    rows = max(1, _PAIR_CHUNK // k)
    for i0 in range(0, k - 1, rows):
        i = np.arange(i0, min(k - 1, i0 + rows))
        # all j > i for each i in the block
        cnt = k - 1 - i
        ii = np.repeat(i, cnt)
        jj = np.arange(ii.size) - np.repeat(np.cumsum(cnt) - cnt, cnt) + ii + 1
        start = x[ii]
        d = x[jj] - start
        keep = (d >= lo_d) & (d <= hi_d)
        start, d = start[keep], d[keep]
        keep = ~member(start - d)
        start, d = start[keep], d[keep]
        if not start.size:
            continue
        length = np.full(start.size, 2, dtype=np.int64)
        live = np.arange(start.size)
        cur = start + 2 * d
        while live.size:
            hit = member(cur)
            live, cur = live[hit], cur[hit]
            length[live] += 1
            cur = cur + d[live]
        top = int(length.max())
        if top < best[0]:
            continue
        sel = np.flatnonzero(length == top)
        j = sel[np.lexsort((start[sel], d[sel]))[0]]
        cand = (top, -int(d[j]), -int(start[j]))
        if cand > best:
            best = cand
    if best[0] == 1:
        return ApRun(lo, min_diff, 1)
    return ApRun(-best[2] + lo, -best[1], best[0])


def _longest_ap_mod(bits, n, min_diff, max_diff, work_cap=None):
    if not bits:
        raise PreconditionError("longest_ap of an empty set")
    top = n - 1 if max_diff is None else min(n - 1, max_diff)
    lo_d = max(1, min_diff)
    low = (bits & -bits).bit_length() - 1
    length, d, start = _scan(bits, lo_d, top, n=n, min_diff=lo_d, first=low, work_cap=work_cap)
    return ApRun(start, d, length)


def longest_ap_in_gap(G: Gap, cap: int = ENUM_CAP) -> ApRun | None:
    """Exact longest AP in Φ(B_G) when the doubled box has no vanishing vector.

    If no nonzero v with |v_i| <= 2 n_i has sum v_i a_i = 0, any AP in the image
    comes from an AP of lattice points, so the answer is max n_i + 1 along a
    direction in {-1, 0, 1}^d supported on the longest coordinates.  Returns
    None when that certificate is not available (use the generic route).
    """
    if find_vanishing_vector(G.diffs, [2 * n for n in G.lengths], cap=cap) is not None:
        return None
    top = max(G.lengths)
    if top == 0:
        return ApRun(G.base, 1, 1)
    idx = [i for i, n in enumerate(G.lengths) if n == top]
    best = None
    for signs in _sign_vectors(len(idx)):
        D = sum(s * G.diffs[i] for s, i in zip(signs, idx))
        if D < 0:
            continue
        u = dict(zip(idx, signs))
        # +1 coordinates start at 0, -1 coordinates at their top, free ones at their minimum
        start = G.base
        for i, (a, n) in enumerate(zip(G.diffs, G.lengths)):
            s = u.get(i, 0)
            start += a * n if s < 0 else (min(0, a * n) if s == 0 else 0)
        cand = (D, start)
        if best is None or cand < best:
            best = cand
    return ApRun(best[1], best[0], top + 1)


def _sign_vectors(k):
    for v in itertools.product((-1, 0, 1), repeat=k):
        if any(v):
            yield v


# -- proper GAP search ------------------------------------------------------

def _top_differences(S, k, min_count=1, budget=DEFAULT_BUDGET):
    """The k most frequent positive differences of S with count >= min_count (ties to the smaller d)."""
    bits = S.bits >> S.min()
    pairs = [(d, _count(bits, d, c))
             for d, c in _difference_counts(S, 1, min(S.max() - S.min(), _span_cap(S, budget)))]
    pairs = [(d, c) for d, c in pairs if c >= min_count]
    if not pairs:
        return []
    ds = np.array([d for d, _ in pairs])
    counts = np.array([c for _, c in pairs])
    order = np.lexsort((ds, -counts))[:k]
    return [int(d) for d in ds[order]]


def _span_cap(S, budget=DEFAULT_BUDGET):
    # without an FFT only the first differences are scanned, as many as the budget pays for
    span = S.max() - S.min()
    k = len(S)
    if k * (k - 1) // 2 <= min(_PAIR_DIFFS, span) or span + 1 <= _FFT_SPAN:
        return span
    return max(TOP_DIFFS, min(_FALLBACK_DIFFS, budget // (span // 64 + 1)))


class _Lookup:
    """Membership and forward d-runs of a shifted set, dense or member-indexed."""

    def __init__(self, members, span):
        self.members = members
        self.span = span
        self.dense = span + 1 <= min(16 * members.size, _DENSE_LOOKUP)
        if self.dense:
            self.ind = np.zeros(span + 1, dtype=bool)
            self.ind[members] = True

    @property
    def cost(self):
        return self.span + 1 if self.dense else self.members.size

    def _index(self, pos):
        x = self.members
        idx = np.searchsorted(x, pos)
        idx = np.minimum(idx, x.size - 1)
        return idx, x[idx] == pos

    def contains(self, pos):
        ok = (pos >= 0) & (pos <= self.span)
        out = np.zeros(pos.size, dtype=bool)
        if self.dense:
            out[ok] = self.ind[pos[ok]]
        else:
            out[ok] = self._index(pos[ok])[1]
        return out

    def runs(self, d):
        """Function pos -> number of consecutive members pos, pos+d, ... (0 if pos not in S)."""
        if self.dense:
            run = _forward_runs(self.ind, d)

            def at(pos):
                out = np.zeros(pos.size, dtype=np.int64)
                ok = (pos >= 0) & (pos <= self.span)
                out[ok] = run[pos[ok]]
                return out
            return at
        run = _member_runs(self.members, d)

        def at(pos):
            out = np.zeros(pos.size, dtype=np.int64)
            ok = (pos >= 0) & (pos <= self.span)
            idx, hit = self._index(pos[ok])
            vals = np.where(hit, run[idx], 0)
            out[ok] = vals
            return out
        return at


def _forward_runs(ind, d):
    """run[x] = number of consecutive members x, x+d, x+2d, ... of the indicator."""
    n = ind.size
    rows = -(-n // d)
    pad = np.zeros(rows * d, dtype=bool)
    pad[:n] = ind
    b = pad.reshape(rows, d)[::-1]
    c = np.cumsum(b, axis=0, dtype=np.int32)
    reset = np.maximum.accumulate(np.where(~b, c, 0), axis=0)
    return (c - reset)[::-1].reshape(-1)[:n]


def _member_runs(x, d):
    """Same as _forward_runs, indexed by member: list ranking by pointer jumping."""
    k = x.size
    nxt = np.searchsorted(x, x + d)
    has = nxt < k
    has[has] = x[nxt[has]] == x[has] + d
    ptr = np.where(has, nxt, -1)
    run = np.ones(k, dtype=np.int64)
    live = np.flatnonzero(ptr >= 0)
    while live.size:
        p = ptr[live]
        run[live] += run[p]
        ptr[live] = ptr[p]
        live = live[ptr[live] >= 0]
    return run


def _grow_pair(look, run1, d1, d2, budget, best_vol):
    """Best (volume, start, n1, n2) of a proper box with differences d1 < d2."""
    members = look.members
    span = look.span
    g = gcd(d1, d2)
    p1, p2 = d2 // g, d1 // g   # primitive vanishing vector (p1, -p2)
    # corners: cannot be extended backwards along both differences
    in1 = look.contains(members - d1)
    in2 = look.contains(members - d2)
    starts = members[~(in1 & in2)]
    w = run1(starts)
    starts = starts[w >= 2]
    w = w[w >= 2]
    if starts.size == 0:
        return None, 0
    reach = (span - starts) // d2
    # a start must have room to beat the current best
    ok = (w - 1) * np.minimum(reach, span) > best_vol
    starts, w, reach = starts[ok], w[ok], reach[ok]
    est = int(np.sum(reach))
    if starts.size and est > budget:
        stride = -(-est // budget)
        starts, w, reach = starts[::stride], w[::stride], reach[::stride]
    used = 0
    best = None
    K = 0
    pos = starts.copy()
    while starts.size:
        K += 1
        pos = pos + d2
        w = np.minimum(w, run1(pos))
        used += pos.size
        n1 = w - 1
        if K >= p2:
            n1 = np.minimum(n1, p1 - 1)
        vol = n1 * K
        j = int(np.argmax(vol))
        if vol[j] > best_vol:
            best_vol = int(vol[j])
            best = (best_vol, int(starts[j]), int(n1[j]), K)
        keep = (w >= 2) & ((w - 1) * (reach) > best_vol)
        starts, pos, w, reach = starts[keep], pos[keep], w[keep], reach[keep]
        if used > budget:
            break
    return best, used


def find_proper_gap(S: IntSet, max_rank: int = 2, budget: int = DEFAULT_BUDGET,
                    top: int = TOP_DIFFS, ap: ApRun | None = None) -> Gap | None:
    """Best-found proper GAP inside S, certified by exact properness and membership checks.

    Rank 1 is exact (longest AP).  Rank 2 tries pairs of the most frequent
    positive differences and grows boxes from corner points; the outcome is a
    valid certificate, not a claim of maximality.  Ties go to the lower rank.
    Rank 2 is skipped when a counting bound shows it cannot beat the AP, or
    when S has more than RANK2_MAX_POINTS elements.
    ``ap`` may pass a longest AP already computed for S.
    """
    if max_rank not in (1, 2):
        raise PreconditionError("max_rank must be 1 or 2")
    if len(S) < 2:
        return None
    if ap is None:
        ap = longest_ap(S)
    best = ap.as_gap() if ap.length >= 3 else None
    best_vol = best.volume if best is not None else 1
    if max_rank == 2 and len(S) >= 4 and _rank2_can_win(len(S), best_vol) \
            and len(S) <= RANK2_MAX_POINTS:
        cand = _rank2_search(S, budget, top, best_vol)
        if cand is not None and cand.volume > best_vol:
            best = cand
    return best


def _rank2_can_win(k, best_vol):
    """Can a proper rank-2 box inside a k-set have volume > best_vol?

    (n1+1)(n2+1) <= k and n1 n2 > best_vol force n1 + n2 <= k - best_vol - 2,
    and then n1 n2 <= ((n1 + n2) / 2)^2.
    """
    s = k - best_vol - 2
    return s >= 2 and s * s >= 4 * (best_vol + 1)


def _rank2_search(S, budget, top, best_vol):
    lo = S.min()
    shifted = S.shifted(-lo)
    look = _Lookup(shifted.members, shifted.max())
    # a box with n1 n2 > best_vol has more than best_vol pairs along each difference
    ranked = _top_differences(shifted, top, min_count=best_vol + 1, budget=budget)
    rank = {d: i for i, d in enumerate(ranked)}
    # most frequent pairs first, so a budget cut drops the least promising ones
    pairs = sorted(((min(x, y), max(x, y)) for i, x in enumerate(ranked) for y in ranked[i + 1:]),
                   key=lambda p: (rank[p[0]] + rank[p[1]], p))
    if not pairs:
        return None
    per_pair = max(1000, budget // len(pairs))
    spent = 0
    found = []
    runs = {}
    for d1, d2 in pairs:
        if spent >= budget:
            break
        if d1 not in runs:
            if len(runs) >= 8:
                runs.pop(next(iter(runs)))
            runs[d1] = look.runs(d1)
            spent += look.cost
        res, used = _grow_pair(look, runs[d1], d1, d2, per_pair, best_vol)
        spent += used + look.members.size
        if res is not None:
            found.append((res[0], d1, d2, res))
            best_vol = max(best_vol, res[0])
    for vol, d1, d2, (v, s, n1, n2) in sorted(found, key=lambda t: (-t[0], t[1], t[2])):
        G = Gap(s + lo, (d1, d2), (n1, n2))
        if gap_is_proper(G)[0] and verify_gap_in_set(G, S):
            return G
    return None


# -- doubling profile -------------------------------------------------------

@dataclass(frozen=True)
class DoublingProfile:
    sizes: tuple[int, ...]
    truncated: bool = False
    ratios: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        r = tuple(b / a for a, b in zip(self.sizes, self.sizes[1:]))
        object.__setattr__(self, "ratios", r)

    def first_flat_index(self, d: int) -> int | None:
        """Smallest i >= 1 with |A_i| <= 2^(d + 3/2) |A_(i-1)|, or None."""
        limit = 2.0 ** (d + 1.5)
        for i, r in enumerate(self.ratios, 1):
            if r <= limit:
                return i
        return None


def doubling_profile(A: IntSet, s_max: int, max_universe: int = 1 << 31) -> DoublingProfile:
    """|A_i| for A_0 = A, A_i = 2 A_(i-1), i <= s_max; truncated if the universe overflows."""
    if not A.bits:
        raise PreconditionError("empty set")
    sizes = [len(A)]
    cur = A
    truncated = False
    for _ in range(s_max):
        if 2 * cur.bound > max_universe:
            truncated = True
            break
        cur = iterated_sumset(cur, 2, SumCap(max_universe))
        sizes.append(len(cur))
    return DoublingProfile(tuple(sizes), truncated)


# -- Lev covering check -----------------------------------------------------

@dataclass(frozen=True)
class CoverReport:
    m: int
    sumset_size: int
    hypothesis: bool          # |A+B| <= 2.1 m
    cover_diff: int
    cover_length: int
    conclusion: bool          # cover_length <= 1.1 m

    @property
    def violation(self) -> bool:
        return self.hypothesis and not self.conclusion


def minimal_cover(A: IntSet) -> ApRun:
    """Shortest AP containing A: difference is the gcd of consecutive gaps."""
    x = A.tolist()
    if not x:
        raise PreconditionError("empty set")
    g = 0
    for a, b in zip(x, x[1:]):
        g = gcd(g, b - a)
    g = g or 1
    return ApRun(x[0], g, (x[-1] - x[0]) // g + 1)


def lev_cover_check(A: IntSet, B: IntSet) -> CoverReport:
    m = len(A)
    if len(B) != m or m == 0:
        raise PreconditionError("A and B must have the same positive cardinality")
    size = len(A + B)
    cov = minimal_cover(A)
    # compare 10*size <= 21*m exactly rather than with floats
    return CoverReport(m, size, 10 * size <= 21 * m, cov.diff, cov.length, 10 * cov.length <= 11 * m)


# -- filling and rank reduction probes --------------------------------------

def _shift_to_naturals(G: Gap):
    off = -G.min_value if G.min_value < 0 else 0
    return Gap(G.base + off, G.diffs, G.lengths), off


def _rank_search(S, rank, budget):
    ap = longest_ap(S)
    if rank == 1:
        return ap.as_gap() if ap.length >= 2 else None
    return _rank2_search(S, budget, TOP_DIFFS, 0)


@dataclass(frozen=True)
class FillingResult:
    h: int
    gap: Gap
    card: int


def filling_probe(B: IntSet, P: Gap, h_max: int, gamma: float, gamma_prime: float = 0.5,
                  budget: int = DEFAULT_BUDGET) -> FillingResult | None:
    """Smallest h <= h_max for which hB holds a proper GAP of rank(P) with >= gamma'|B| points."""
    if P.rank not in (1, 2):
        raise PreconditionError("filling probe supports rank 1 and 2")
    if P.min_value < 0:
        raise PreconditionError("P must have a non-negative image")
    image = gap_enumerate(P)
    if not B <= image:
        raise PreconditionError("B is not inside P")
    if len(B) < gamma * P.volume:
        raise PreconditionError(f"|B| = {len(B)} < gamma Vol(P) = {gamma * P.volume}")
    need = gamma_prime * len(B)
    for h in range(1, h_max + 1):
        hB = iterated_sumset(B, h)
        G = _rank_search(hB, P.rank, budget)
        if G is not None and G.rank == P.rank and G.box_size >= need:
            if gap_is_proper(G)[0] and verify_gap_in_set(G, hB):
                return FillingResult(h, G, G.box_size)
    return None


@dataclass(frozen=True)
class RankReductionReport:
    q_card: int
    best_g: int
    best_run: ApRun
    best_ratio: float
    first_g_meeting_gamma: int | None
    ratios: tuple[float, ...]


def rank_reduction_probe(Q: Gap, g_max: int, gamma: float | None = None) -> RankReductionReport:
    """Scan g <= g_max for a long AP inside gQ, relative to |Q|."""
    if Q.rank != 2:
        raise PreconditionError("rank reduction probe expects a rank-2 GAP")
    if not gap_is_proper(Q)[0]:
        raise PreconditionError("Q must be proper")
    if gap_is_proper(gap_scale(Q, 2))[0]:
        raise PreconditionError("2Q is proper; nothing to reduce")
    if gamma is None:
        gamma = 1.0 / 2 ** (Q.rank + 1)
    card = Q.box_size
    ratios = []
    best = None
    first = None
    for g in range(1, g_max + 1):
        Gq, off = _shift_to_naturals(gap_scale(Q, g))
        run = longest_ap(gap_enumerate(Gq))
        ratio = run.length / card
        ratios.append(ratio)
        if best is None or ratio > best[2]:
            best = (g, ApRun(run.start - off, run.diff, run.length), ratio)
        if first is None and ratio >= gamma:
            first = g
    return RankReductionReport(card, best[0], best[1], best[2], first, tuple(ratios))
