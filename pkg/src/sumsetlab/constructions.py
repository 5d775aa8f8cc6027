"""Extremal sets whose sumsets have no long progressions, and their verifier.

Every builder returns the set together with a ``ConstructionParams`` record
holding all derived constants, so an output can be re-derived from its record.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

from .core import IntSet, ResidueSet
from .errors import PreconditionError
from .gap import Gap, find_vanishing_vector, gap_enumerate, gap_scale
from .structure import ApRun, longest_ap, longest_ap_in_gap
from .sumsets import SumCap, iterated_sumset

DEFAULT_DELTA = 0.1
GENERIC_UNIVERSE = 1 << 24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for q in range(3, isqrt(n) + 1, 2):
        if n % q == 0:
            return False
    return True


@dataclass(frozen=True)
class ConstructionParams:
    kind: str
    d: int
    n: int
    m: int
    delta: float | None
    l: int | None
    modulus: int | None
    diffs: tuple[int, ...]
    a: int | None = None
    b: int | None = None
    b_list: tuple[int, ...] = ()
    primes: tuple[int, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def gap(self) -> Gap:
        """A as a GAP: base sum a_i, lengths m - 1 (coordinates run over [1, m])."""
        return Gap(sum(self.diffs), self.diffs, (self.m - 1,) * self.d)

    def to_json(self) -> dict:
        out = {k: getattr(self, k) for k in
               ("kind", "d", "n", "m", "delta", "l", "modulus", "a", "b")}
        out["diffs"] = list(self.diffs)
        out["b_list"] = list(self.b_list)
        out["primes"] = list(self.primes)
        out.update(self.extra)
        return out


def _prime_pair(limit, m):
    found = []
    p = limit
    while p > m and len(found) < 2:
        if is_prime(p):
            found.append(p)
        p -= 1
    if len(found) < 2:
        raise PreconditionError(f"no two primes in ({m}, {limit}] for the planar construction")
    return found[0], found[1]


def build_planar(n: int, m: int, primes: tuple[int, int] | None = None):
    """A = {p1 x1 + p2 x2 : 1 <= x1, x2 <= m} with p1 > p2 > m the largest primes <= n/(2m).

    ``primes`` overrides the search (used to exhibit broken parameters).
    """
    if m < 2:
        raise PreconditionError("side m must be at least 2")
    if primes is None:
        p1, p2 = _prime_pair(n // (2 * m), m)
    else:
        p1, p2 = primes
    gap = Gap(p1 + p2, (p1, p2), (m - 1, m - 1))
    A = gap_enumerate(gap)
    params = ConstructionParams("planar", 2, n, m, None, None, None, (p1, p2), primes=(p1, p2),
                                extra={"search_window": [m + 1, n // (2 * m)]})
    if primes is None and A.max() > n:
        raise AssertionError("planar construction left [n]")
    return A, params


def _b_values(d, base):
    # b_1 = 0, b_2 = 1, b_i = floor(base^((i-2)/(d-1))) for i >= 3
    bs = [0, 1]
    for i in range(3, d + 1):
        bs.append(_ifloor_pow(base, i - 2, d - 1))
    return bs[:d]


def _ifloor_pow(x, p, q):
    """floor(x^(p/q)) for a positive rational x given as (num, den), exactly."""
    num, den = x
    # largest y with y^q <= (num/den)^p
    lo, hi = 0, 1
    while hi ** q * den ** p <= num ** p:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** q * den ** p <= num ** p:
            lo = mid
        else:
            hi = mid
    return lo


def _check_31(a, d, l, m, delta):
    lhs = (1 - delta / 3) * a ** (1 / (d - 1))
    rhs = 2 * l * m
    return lhs, rhs


def _frac(delta):
    from fractions import Fraction
    return Fraction(delta).limit_denominator(10**6)


def build_general(d: int, n: int, m: int, delta: float = DEFAULT_DELTA, l: int | None = None,
                  b_rule: str = "consistent"):
    """A = {sum a_i x_i : 1 <= x_i <= m}, a_i = a + b_i.

    a = floor((1 - delta/3) n / (d m)), b = floor((n / (d m))^(1/(d-1))).
    With ``b_rule="consistent"`` b_i = floor((n/(d m))^((i-2)/(d-1))), which
    makes b_j / (b_1 + ... + b_(j-1)) about b.  ``b_rule="literal"`` takes
    b_i = floor(b^((i-2)/(d-1))) instead; for d >= 3 it admits small vanishing
    vectors, kept only to demonstrate that.
    """
    if d < 2:
        raise PreconditionError("d must be at least 2")
    if m < 1:
        raise PreconditionError("side m must be positive")
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    fd = _frac(delta)
    a = int((1 - fd / 3) * n / (d * m))
    b = _ifloor_pow((n, d * m), 1, d - 1)
    if b_rule == "consistent":
        bs = _b_values(d, (n, d * m))
    elif b_rule == "literal":
        bs = [0, 1] + [_ifloor_pow((b, 1), i - 2, d - 1) for i in range(3, d + 1)]
        bs = bs[:d]
    else:
        raise ValueError(f"unknown b_rule {b_rule!r}")
    if a < 1:
        raise PreconditionError(f"degenerate a = {a}")
    extra = {"b_rule": b_rule}
    if l is not None:
        _admissible(d, n, m, delta, l, a, "n")
        lhs, rhs = _check_31(a, d, l, m, delta)
        extra["admissibility"] = [lhs, rhs]
    diffs = tuple(a + bi for bi in bs)
    params = ConstructionParams("general", d, n, m, delta, l, None, diffs, a, b, tuple(bs),
                                extra=extra)
    A = gap_enumerate(params.gap)
    if A.max() > n:
        raise PreconditionError(f"max element {A.max()} exceeds n = {n}")
    return A, params


def _admissible(d, n, m, delta, l, a, label):
    if l < 1:
        raise PreconditionError("l must be positive")
    lhs, rhs = _check_31(a, d, l, m, delta)
    if lhs < rhs:
        raise PreconditionError(
            f"(1 - delta/3) a^(1/(d-1)) = {lhs:.6g} < 2 l m = {rhs}: l = {l} not admissible")
    size_lhs = l ** (d - 1) * m ** d
    size_rhs = (1 - delta) / (2 * d) * n
    if size_lhs > size_rhs:
        raise PreconditionError(
            f"l^(d-1) m^d = {size_lhs} > (1 - delta)/(2d) {label} = {size_rhs:.6g}")


def build_mod(d: int, n: int, m: int, l: int, delta: float = DEFAULT_DELTA, check: bool = True):
    """Residues {sum a_i x_i mod n : 1 <= x_i <= m} with the l-adjusted parameters.

    a = floor((1 - delta/3)(n/l) / (d m)), b = floor((n / (d l m))^(1/(d-1))).
    ``check=False`` builds the set even when l is not admissible; the verdict
    is kept in ``params.extra["admissible"]``.
    """
    if not is_prime(n):
        raise PreconditionError(f"modulus {n} is not prime")
    if d < 2 or m < 1 or l < 1:
        raise PreconditionError("need d >= 2, m >= 1, l >= 1")
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    fd = _frac(delta)
    a = int((1 - fd / 3) * n / (l * d * m))
    if a < 1:
        raise PreconditionError(f"degenerate a = {a} (delta = {delta}, l = {l})")
    b = _ifloor_pow((n, d * l * m), 1, d - 1)
    bs = _b_values(d, (n, d * l * m))
    lhs, rhs = _check_31(a, d, l, m, delta)
    if check and lhs < rhs:
        raise PreconditionError(
            f"(1 - delta/3) a^(1/(d-1)) = {lhs:.6g} < 2 l m = {rhs}: l = {l} not admissible")
    diffs = tuple(a + bi for bi in bs)
    params = ConstructionParams("mod", d, n, m, delta, l, n, diffs, a, b, tuple(bs),
                                extra={"admissibility": [lhs, rhs], "admissible": lhs >= rhs})
    vals = gap_enumerate(params.gap).tolist()
    return ResidueSet.of(vals, n), params


def nondegeneracy_witness(params: ConstructionParams, l: int):
    """A nonzero r with all |r_i| < 2 l m and sum r_i a_i = 0 (mod n if modular), or None."""
    bound = 2 * l * params.m
    return find_vanishing_vector(params.diffs, [bound] * params.d, modulus=params.modulus,
                                 strict=True)


@dataclass(frozen=True)
class ExtremalReport:
    l: int
    expected_card: int
    card: int
    lA_card: int | None
    ap: ApRun
    ap_bound: int
    method: str

    @property
    def card_ok(self) -> bool:
        return self.card == self.expected_card

    @property
    def ap_ok(self) -> bool:
        return self.ap.length <= self.ap_bound

    @property
    def passed(self) -> bool:
        return self.card_ok and self.ap_ok

    def to_json(self) -> dict:
        return {"l": self.l, "expected_card": self.expected_card, "card": self.card,
                "card_ok": self.card_ok, "lA_card": self.lA_card, "ap": self.ap.to_json(),
                "ap_bound": self.ap_bound, "ap_ok": self.ap_ok, "method": self.method,
                "passed": self.passed}


def verify_extremal(A, params: ConstructionParams, l: int, method: str = "auto") -> ExtremalReport:
    """Check |A| = m^d and that lA has no AP longer than l m.

    ``method``: "generic" computes lA and runs the generic longest-AP search;
    "structural" reads the answer off the GAP lA = l * Gap(A) when the doubled
    box has no vanishing vector; "auto" picks generic when lA is small.
    """
    expected = params.m ** params.d
    bound = l * params.m
    if params.modulus is not None:
        lA = iterated_sumset(A, l, SumCap(modulus=params.modulus))
        ap = longest_ap(lA)
        return ExtremalReport(l, expected, len(A), len(lA), ap, bound, "generic-mod")
    universe = l * A.bound
    if method == "auto":
        method = "generic" if universe <= GENERIC_UNIVERSE else "structural"
    if method == "structural":
        ap = longest_ap_in_gap(gap_scale(params.gap, l))
        if ap is not None:
            return ExtremalReport(l, expected, len(A), None, ap, bound, "structural")
        if universe > 8 * GENERIC_UNIVERSE:
            raise PreconditionError("no structural certificate and lA too large for the generic route")
        method = "generic"
    if method != "generic":
        raise ValueError(f"unknown method {method!r}")
    lA = iterated_sumset(A, l)
    return ExtremalReport(l, expected, len(A), len(lA), longest_ap(lA), bound, "generic")
