"""Longest AP in lA for an interval and for the planar set of the same size.

    python demos/sudden_jump.py [n] [m]
"""
import sys

from sumsetlab.constructions import build_planar, verify_extremal
from sumsetlab.core import IntSet
from sumsetlab.structure import longest_ap
from sumsetlab.sumsets import iterated_sumset


def main(n=10**6, m=20):
    A, params = build_planar(n, m)
    I = IntSet.interval(1, len(A))
    top = int(n // (4.1 * m * m))
    print(f"n = {n}, |A| = {len(A)}, planar primes {params.primes}")
    print(f"{'l':>6} {'interval':>10} {'planar':>8} {'l m':>8} {'ratio':>6}")
    l = 1
    while l <= top:
        iv = longest_ap(iterated_sumset(I, l)).length
        pl = verify_extremal(A, params, l).ap.length
        print(f"{l:>6} {iv:>10} {pl:>8} {l * m:>8} {iv / pl:>6.1f}")
        l = min(2 * l, top) if l < top else top + 1


if __name__ == "__main__":
    main(*map(int, sys.argv[1:]))
