"""Integer sets, residue sets and sequence prefixes.

``IntSet`` is the currency of every engine: a finite set of integers in
``[0, bound]`` packed into a Python int.  Values are immutable.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _bits, _engine


class IntSet:
    """Finite set of non-negative integers inside ``[0, bound]``.

    >>> sorted(IntSet([1, 2]) + IntSet([10, 20]))
    [11, 12, 21, 22]
    """

    __slots__ = ("bound", "bits")

    def __init__(self, members: Iterable[int] = (), bound: int | None = None):
        arr = np.asarray(list(members) if not isinstance(members, np.ndarray) else members,
                         dtype=np.int64).ravel()
        if arr.size and arr.min() < 0:
            raise ValueError("IntSet members must be non-negative; shift the input first")
        top = int(arr.max()) if arr.size else 0
        if bound is None:
            bound = top
        if bound < 0 or top > bound:
            raise ValueError(f"member {top} exceeds universe bound {bound}")
        object.__setattr__(self, "bound", int(bound))
        object.__setattr__(self, "bits", _bits.indices_to_bits(arr, int(bound)))

    @classmethod
    def from_bits(cls, bits: int, bound: int) -> "IntSet":
        if bits < 0 or bits.bit_length() > bound + 1:
            raise ValueError("bits outside the universe")
        s = cls.__new__(cls)
        object.__setattr__(s, "bound", int(bound))
        object.__setattr__(s, "bits", bits)
        return s

    @classmethod
    def interval(cls, lo: int, hi: int, bound: int | None = None) -> "IntSet":
        bound = hi if bound is None else bound
        if lo > hi:
            return cls.from_bits(0, bound)
        return cls.from_bits(((1 << (hi - lo + 1)) - 1) << lo, bound)

    def __setattr__(self, name, value):
        raise AttributeError("IntSet is immutable")

    # -- views -----------------------------------------------------------
    @property
    def members(self) -> np.ndarray:
        return _bits.bits_to_indices(self.bits, self.bound)

    def tolist(self) -> list[int]:
        return self.members.tolist()

    def __len__(self):
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.tolist())

    def __contains__(self, x):
        return 0 <= x <= self.bound and (self.bits >> x) & 1 == 1

    def __eq__(self, other):
        """Set equality; the universe bound is not compared."""
        if isinstance(other, IntSet):
            return self.bits == other.bits
        return NotImplemented

    def __hash__(self):
        return hash(self.bits)

    def __le__(self, other: "IntSet"):
        return self.bits & ~other.bits == 0

    def __repr__(self):
        n = len(self)
        body = self.tolist() if n <= 12 else f"{n} members"
        return f"IntSet({body}, bound={self.bound})"

    def __add__(self, other):
        if isinstance(other, IntSet):
            return sumset(self, other)
        return NotImplemented

    def min(self) -> int:
        if not self.bits:
            raise ValueError("empty set")
        return (self.bits & -self.bits).bit_length() - 1

    def max(self) -> int:
        if not self.bits:
            raise ValueError("empty set")
        return self.bits.bit_length() - 1

    def union(self, other: "IntSet") -> "IntSet":
        return IntSet.from_bits(self.bits | other.bits, max(self.bound, other.bound))

    def intersection(self, other: "IntSet") -> "IntSet":
        return IntSet.from_bits(self.bits & other.bits, min(self.bound, other.bound))

    def shifted(self, offset: int) -> "IntSet":
        """Translate by ``offset`` (members must stay non-negative)."""
        if offset >= 0:
            return IntSet.from_bits(self.bits << offset, self.bound + offset)
        if self.bits and self.min() + offset < 0:
            raise ValueError("shift would produce negative members")
        return IntSet.from_bits(self.bits >> -offset, max(0, self.bound + offset))

    def _packed(self):
        return _engine.Packed(self.bound, bits=self.bits)


@dataclass(frozen=True)
class ResidueSet:
    """A set of residues modulo ``modulus``."""

    modulus: int
    bits: int = 0

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be at least 2")
        if self.bits < 0 or self.bits.bit_length() > self.modulus:
            raise ValueError("residue bits outside [0, modulus)")

    @classmethod
    def of(cls, members: Iterable[int], modulus: int) -> "ResidueSet":
        bits = 0
        for m in members:
            bits |= 1 << (int(m) % modulus)
        return cls(modulus, bits)

    @property
    def members(self) -> list[int]:
        return _bits.bits_to_indices(self.bits, self.modulus - 1).tolist()

    def __len__(self):
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x):
        return (self.bits >> (x % self.modulus)) & 1 == 1

    def __repr__(self):
        return f"ResidueSet({self.members}, modulus={self.modulus})"


@dataclass(frozen=True)
class SeqPrefix:
    """Finite non-decreasing prefix of a sequence of positive integers.

    Multiplicity is kept as repeated entries.
    """

    elements: tuple[int, ...]
    declared_length: int | None = field(default=None)

    def __post_init__(self):
        els = tuple(int(x) for x in self.elements)
        object.__setattr__(self, "elements", els)
        if any(x < 1 for x in els):
            raise ValueError("sequence elements must be positive")
        if any(a > b for a, b in zip(els, els[1:])):
            raise ValueError("sequence must be non-decreasing")
        if self.declared_length is None:
            object.__setattr__(self, "declared_length", len(els))

    @classmethod
    def of(cls, values: Iterable[int]) -> "SeqPrefix":
        return cls(tuple(sorted(int(v) for v in values)))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def total(self) -> int:
        return sum(self.elements)


def sumset(A: IntSet, B: IntSet) -> IntSet:
    """A + B = {a + b}; the universe bound is the sum of the two bounds."""
    out = _engine.add(A._packed(), B._packed())
    return IntSet.from_bits(out.bits, A.bound + B.bound)


def seq_count(A: SeqPrefix, n: int) -> int:
    """A(n): number of elements of the prefix in [1, n], counted with multiplicity."""
    if n < 1:
        raise ValueError("n must be positive")
    return bisect.bisect_right(A.elements, n)


# -- text format ------------------------------------------------------------

def parse_ints(text: str) -> list[int]:
    """One integer per line; ``#`` starts a comment; blank lines ignored."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise ValueError(f"line {lineno}: not an integer: {line!r}") from None
    return out


def format_ints(values: Iterable[int], header: str | None = None) -> str:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines.extend(str(int(v)) for v in values)
    return "\n".join(lines) + "\n"


def read_set(path, bound: int | None = None) -> IntSet:
    return IntSet(parse_ints(Path(path).read_text()), bound=bound)


def read_seq(path) -> SeqPrefix:
    return SeqPrefix.of(parse_ints(Path(path).read_text()))


def write_set(path, S, header: str | None = None) -> None:
    Path(path).write_text(format_ints(S, header))
