"""Generalized arithmetic progressions {a + sum x_i a_i : 0 <= x_i <= n_i}.

Equality of ``Gap`` objects is structural (base, differences, lengths).  Two
different descriptors can have the same image; compare images through
``gap_enumerate`` when set equality is meant.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod

import numpy as np

from . import _bits
from .core import IntSet
from .errors import CapExceeded, PreconditionError

ENUM_CAP = 10**8
_BLOCK = 1 << 21
_DENSE_SPAN = 1 << 28


@dataclass(frozen=True)
class Gap:
    base: int
    diffs: tuple[int, ...]
    lengths: tuple[int, ...]

    def __post_init__(self):
        diffs = tuple(int(a) for a in self.diffs)
        lengths = tuple(int(n) for n in self.lengths)
        object.__setattr__(self, "base", int(self.base))
        object.__setattr__(self, "diffs", diffs)
        object.__setattr__(self, "lengths", lengths)
        if not diffs:
            raise ValueError("a GAP needs rank >= 1")
        if len(diffs) != len(lengths):
            raise ValueError("diffs and lengths differ in length")
        if any(a == 0 for a in diffs):
            raise ValueError("differences must be nonzero")
        if any(n < 0 for n in lengths):
            raise ValueError("lengths must be non-negative")

    @property
    def rank(self) -> int:
        return len(self.diffs)

    @property
    def volume(self) -> int:
        return prod(self.lengths)

    @property
    def box_size(self) -> int:
        """|B_Q| = prod (n_i + 1)."""
        return prod(n + 1 for n in self.lengths)

    @property
    def min_value(self) -> int:
        return self.base + sum(min(0, a * n) for a, n in zip(self.diffs, self.lengths))

    @property
    def max_value(self) -> int:
        return self.base + sum(max(0, a * n) for a, n in zip(self.diffs, self.lengths))

    def phi(self, x) -> int:
        return self.base + sum(a * xi for a, xi in zip(self.diffs, x))

    def __str__(self):
        return format_gap(self)


def parse_gap(text: str) -> Gap:
    """Parse ``a ; a1,a2,... ; n1,n2,...``."""
    parts = [p.strip() for p in text.strip().split(";")]
    if len(parts) != 3:
        raise ValueError(f"GAP literal needs three ';'-separated fields: {text!r}")
    base = int(parts[0])
    diffs = tuple(int(x) for x in parts[1].split(",") if x.strip())
    lengths = tuple(int(x) for x in parts[2].split(",") if x.strip())
    return Gap(base, diffs, lengths)


def format_gap(G: Gap) -> str:
    return f"{G.base} ; {','.join(map(str, G.diffs))} ; {','.join(map(str, G.lengths))}"


def _check_cap(G, cap):
    if G.box_size > cap:
        raise CapExceeded(f"box of {G.box_size} lattice points exceeds enumeration cap {cap}")


def _blocks(G):
    """Yield Φ-values of B_Q in lexicographic order (x_1 most significant), in blocks."""
    d = G.rank
    dims = [n + 1 for n in G.lengths]
    # trailing coordinates form a dense block, leading ones are iterated
    split = d
    size = 1
    while split > 0 and size * dims[split - 1] <= _BLOCK:
        split -= 1
        size *= dims[split]
    if split == d:
        # even the last coordinate alone is too long: cut it into pieces
        lead_dims = dims[:-1]
        a_last = G.diffs[-1]
        for lead in itertools.product(*(range(k) for k in lead_dims)):
            off = G.base + sum(a * x for a, x in zip(G.diffs, lead))
            for lo in range(0, dims[-1], _BLOCK):
                hi = min(dims[-1], lo + _BLOCK)
                yield off + a_last * np.arange(lo, hi, dtype=np.int64)
        return
    block = np.zeros(1, dtype=np.int64)
    for a, k in zip(G.diffs[split:], dims[split:]):
        block = (block[:, None] + a * np.arange(k, dtype=np.int64)[None, :]).ravel()
    for lead in itertools.product(*(range(k) for k in dims[:split])):
        off = G.base + sum(a * x for a, x in zip(G.diffs, lead))
        yield block + off


def gap_values(G: Gap, cap: int = ENUM_CAP) -> np.ndarray:
    """Φ over B_Q in lexicographic order, as one array (may contain repeats)."""
    _check_cap(G, cap)
    return np.concatenate(list(_blocks(G)))


def gap_enumerate(G: Gap, cardinality_only: bool = False, cap: int = ENUM_CAP):
    """Φ(B_Q) as an IntSet, or its cardinality."""
    _check_cap(G, cap)
    lo, hi = G.min_value, G.max_value
    if lo < 0 and not cardinality_only:
        raise PreconditionError(f"image reaches {lo} < 0; shift the base first")
    span = hi - lo
    if span < _DENSE_SPAN:
        seen = np.zeros(span + 1, dtype=bool)
        for vals in _blocks(G):
            seen[vals - lo] = True
        if cardinality_only:
            return int(np.count_nonzero(seen))
        bits = _bits.bool_to_bits(seen) << lo
        return IntSet.from_bits(bits, hi)
    packed = np.zeros(_bits.nbytes_for(span), dtype=np.uint8)
    for vals in _blocks(G):
        v = vals - lo
        np.bitwise_or.at(packed, v >> 3, (np.uint8(1) << (v & 7).astype(np.uint8)))
    if cardinality_only:
        return int(np.unpackbits(packed).sum()) if packed.size < (1 << 24) else _popcount(packed)
    return IntSet.from_bits(_bits.bytes_to_bits(packed) << lo, hi)


def _popcount(packed):
    table = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)
    return int(table[packed].sum())


def gap_is_proper(G: Gap, cap: int = ENUM_CAP):
    """(True, None) if Φ is injective on B_Q, else (False, v) with v a vanishing vector.

    v is the difference of the first colliding pair met in lexicographic order
    (later point minus earlier point).
    """
    _check_cap(G, cap)
    dims = tuple(n + 1 for n in G.lengths)
    if G.box_size <= _BLOCK * 4:
        vals = gap_values(G, cap)
        hit = _first_collision(vals)
        if hit is None:
            return True, None
        i, j = hit
        return False, _vec(dims, j, i)
    lo, span = G.min_value, G.max_value - G.min_value
    seen = np.zeros(span + 1, dtype=bool) if span < _DENSE_SPAN else None
    packed = None if seen is not None else np.zeros(_bits.nbytes_for(span), dtype=np.uint8)
    offset = 0
    for vals in _blocks(G):
        v = vals - lo
        if seen is not None:
            old = seen[v]
        else:
            old = (packed[v >> 3] >> (v & 7).astype(np.uint8)) & 1
        uniq = np.unique(v).size == v.size
        if old.any() or not uniq:
            j = offset + _first_repeat_in_block(v, old.astype(bool))
            value = int(vals[j - offset])
            i = _first_index_of(G, value)
            return False, _vec(dims, j, i)
        if seen is not None:
            seen[v] = True
        else:
            packed[v >> 3] |= (np.uint8(1) << (v & 7).astype(np.uint8))
        offset += v.size
    return True, None


def _first_collision(vals):
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    dup = np.flatnonzero(sv[1:] == sv[:-1]) + 1
    if dup.size == 0:
        return None
    # the later member of each equal run; the earliest index of its value is the run head
    heads = np.flatnonzero(np.r_[True, sv[1:] != sv[:-1]])
    head_of = heads[np.searchsorted(heads, dup, side="right") - 1]
    later = order[dup]
    k = int(np.argmin(later))
    return int(order[head_of[k]]), int(later[k])


def _first_repeat_in_block(v, old):
    order = np.argsort(v, kind="stable")
    sv = v[order]
    repeat = np.zeros(v.size, dtype=bool)
    repeat[order[1:][sv[1:] == sv[:-1]]] = True
    return int(np.flatnonzero(repeat | old)[0])


def _first_index_of(G, value):
    offset = 0
    for vals in _blocks(G):
        hit = np.flatnonzero(vals == value)
        if hit.size:
            return offset + int(hit[0])
        offset += vals.size
    raise AssertionError("value not found in its own GAP")


def _vec(dims, later, earlier):
    a = np.array(np.unravel_index(later, dims))
    b = np.array(np.unravel_index(earlier, dims))
    return tuple(int(x) for x in a - b)


def find_vanishing_vector(diffs, bounds, modulus: int | None = None, strict: bool = False,
                          cap: int = ENUM_CAP):
    """First nonzero v (lexicographic) with |v_i| <= bounds_i and sum v_i a_i = 0.

    With ``strict`` the bounds are exclusive; with ``modulus`` the equation is
    taken mod that (prime) modulus.  All coordinates but the last are
    enumerated; the last one is solved for.  Returns None when none exists.
    """
    diffs = [int(a) for a in diffs]
    bounds = [int(b) - (1 if strict else 0) for b in bounds]
    if any(b < 0 for b in bounds):
        return None
    d = len(diffs)
    lead = prod(2 * b + 1 for b in bounds[:-1])
    if lead > cap:
        raise CapExceeded(f"{lead} leading coordinate vectors exceed cap {cap}")
    a_last, b_last = diffs[-1], bounds[-1]
    inv = None
    if modulus is not None:
        if a_last % modulus == 0:
            raise PreconditionError("last difference must be invertible modulo the modulus")
        inv = pow(a_last, -1, modulus)
    if d == 1:
        return None
    inner_b = bounds[-2]
    inner = np.arange(-inner_b, inner_b + 1, dtype=np.int64)
    a_inner = diffs[-2]
    for head in itertools.product(*(range(-b, b + 1) for b in bounds[:-2])):
        s = sum(a * x for a, x in zip(diffs, head)) + a_inner * inner
        if modulus is None:
            ok = (s % a_last == 0)
            last = np.where(ok, -(s // a_last), 0)
        else:
            last = (-(s % modulus) * inv) % modulus
            last = np.where(last > modulus // 2, last - modulus, last)
            ok = np.ones(s.size, dtype=bool)
        ok &= np.abs(last) <= b_last
        nz = ok & ((inner != 0) | (last != 0) | any(head))
        hit = np.flatnonzero(nz)
        if hit.size:
            k = int(hit[0])
            return tuple(int(x) for x in head) + (int(inner[k]), int(last[k]))
    return None


def gap_add(G: Gap, H: Gap) -> Gap:
    if G.diffs != H.diffs:
        raise PreconditionError("only GAPs with the same difference set can be added")
    return Gap(G.base + H.base, G.diffs, tuple(m + n for m, n in zip(G.lengths, H.lengths)))


def gap_scale(G: Gap, l: int) -> Gap:
    """lG = G + ... + G (l copies)."""
    if l < 1:
        raise PreconditionError("l must be at least 1")
    return Gap(l * G.base, G.diffs, tuple(l * n for n in G.lengths))


def gap_divide(G: Gap, s: int) -> Gap:
    """(1/s)G for a normal GAP whose lengths are all divisible by s."""
    if s < 1:
        raise PreconditionError("s must be positive")
    if G.base != 0:
        raise PreconditionError("division is defined for normal GAPs (base 0) only")
    if any(n % s for n in G.lengths):
        raise PreconditionError(f"lengths {G.lengths} not all divisible by {s}")
    return Gap(0, G.diffs, tuple(n // s for n in G.lengths))


def verify_gap_in_set(G: Gap, S: IntSet, cap: int = ENUM_CAP) -> bool:
    """True iff every point of Φ(B_Q) lies in S."""
    _check_cap(G, cap)
    if G.min_value < 0 or G.max_value > S.bound:
        return False
    buf = _bits.bits_to_bytes(S.bits, S.bound)
    for vals in _blocks(G):
        if not np.all((buf[vals >> 3] >> (vals & 7).astype(np.uint8)) & 1):
            return False
    return True


def rank2_image_size(G: Gap) -> int:
    """|Φ(B_Q)| for rank 2 without enumeration.

    With (a, b) the differences divided by their gcd, (x1, x2) and
    (x1 + |b|, x2 - sign(b) a) share a value, so every value class is a chain
    along that step and its count is the box minus the points that have a
    predecessor in the box.
    """
    if G.rank != 2:
        raise PreconditionError("closed form is for rank 2")
    a1, a2 = G.diffs
    n1, n2 = G.lengths
    g = gcd(a1, a2)
    a, b = abs(a1 // g), abs(a2 // g)
    return (n1 + 1) * (n2 + 1) - max(0, n1 - b + 1) * max(0, n2 - a + 1)


def collapse_profile(Q: Gap, g_max: int, method: str = "enumerate") -> list[float]:
    """|gQ| / Vol(gQ) for g = 1..g_max; ``method`` is "enumerate" or "lattice" (rank 2)."""
    if Q.volume == 0:
        raise PreconditionError("collapse ratio needs all lengths >= 1")
    out = []
    for g in range(1, g_max + 1):
        gQ = gap_scale(Q, g)
        if method == "lattice":
            size = rank2_image_size(gQ)
        elif method == "enumerate":
            size = gap_enumerate(gQ, cardinality_only=True)
        else:
            raise ValueError(f"unknown method {method!r}")
        out.append(size / gQ.volume)
    return out
