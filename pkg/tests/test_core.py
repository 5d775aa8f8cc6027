import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from sumsetlab.core import (IntSet, ResidueSet, SeqPrefix, format_ints, parse_ints, read_seq,
                            read_set, seq_count, sumset, write_set)

small_sets = st.sets(st.integers(0, 60), max_size=30)


def test_sumset_examples():
    assert sumset(IntSet([1, 2]), IntSet([10, 20])).tolist() == [11, 12, 21, 22]
    A = IntSet([3, 7, 19])
    assert sumset(IntSet([0]), A) == A


def test_sumset_bound_is_exact_sum():
    A = IntSet([1, 2], bound=10)
    B = IntSet([5], bound=7)
    assert sumset(A, B).bound == 17


def test_sumset_empty():
    assert len(sumset(IntSet([]), IntSet([1, 2]))) == 0
    assert len(sumset(IntSet([4]), IntSet([], bound=9))) == 0


def test_sumset_random_vs_double_loop():
    rng = random.Random(1)
    for _ in range(300):
        A = rng.sample(range(200), rng.randint(1, 50))
        B = rng.sample(range(200), rng.randint(1, 50))
        assert sumset(IntSet(A), IntSet(B)).tolist() == sorted(oracles.sumset(A, B))


def test_sumset_large_sparse_and_dense():
    # sizes that route through different kernels must all agree with numpy
    rng = np.random.default_rng(7)
    for k, span in ((5, 10**6), (3000, 10**5), (20000, 40000)):
        a = rng.choice(span, size=k, replace=False)
        b = rng.choice(span, size=k, replace=False)
        want = np.unique(np.add.outer(a[:2000], b[:2000]))
        got = sumset(IntSet(a[:2000]), IntSet(b[:2000])).members
        assert np.array_equal(got, want)


@settings(max_examples=60, deadline=None)
@given(small_sets, small_sets, small_sets)
def test_sumset_commutative_associative(a, b, c):
    A, B, C = IntSet(a), IntSet(b), IntSet(c)
    assert A + B == B + A
    assert (A + B) + C == A + (B + C)


def test_sumset_size_bounds_exhaustive_small():
    rng = random.Random(3)
    for _ in range(2000):
        A = rng.sample(range(41), rng.randint(1, 8))
        B = rng.sample(range(41), rng.randint(1, 8))
        n = len(sumset(IntSet(A), IntSet(B)))
        assert len(A) + len(B) - 1 <= n <= len(A) * len(B)


def test_cauchy_davenport_small_primes():
    for p in (2, 3, 5, 7, 11, 13):
        for mask in range(1, 1 << p):
            A = [i for i in range(p) if mask >> i & 1]
            doubled = {(a + b) % p for a in A for b in A}
            assert len(doubled) >= min(p, 2 * len(A) - 1)


def test_intset_invariants():
    with pytest.raises(ValueError):
        IntSet([-1])
    with pytest.raises(ValueError):
        IntSet([5], bound=4)
    S = IntSet([3, 3, 1])
    assert len(S) == 2 and S.tolist() == [1, 3]
    assert 3 in S and 2 not in S and -1 not in S
    with pytest.raises(AttributeError):
        S.bound = 9


def test_intset_helpers():
    S = IntSet.interval(2, 5, bound=10)
    assert S.tolist() == [2, 3, 4, 5] and S.bound == 10
    assert S.min() == 2 and S.max() == 5
    assert S.shifted(3).tolist() == [5, 6, 7, 8]
    assert S.shifted(-2).tolist() == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        S.shifted(-3)
    T = IntSet([4, 9])
    assert S.union(T).tolist() == [2, 3, 4, 5, 9]
    assert S.intersection(T).tolist() == [4]
    assert IntSet([2, 4]) <= S
    assert len(IntSet.interval(5, 4)) == 0


def test_residue_set():
    R = ResidueSet.of([1, 6, 13, -1], 5)
    assert R.members == [1, 3, 4]
    assert len(R) == 3 and 8 in R
    with pytest.raises(ValueError):
        ResidueSet(1)


def test_seq_prefix_and_count():
    A = SeqPrefix((1, 1, 2, 5))
    assert seq_count(A, 2) == 3
    assert seq_count(SeqPrefix(tuple(range(1, 101))), 100) == 100
    k, n = 3, 7
    B = SeqPrefix.of([v for v in range(1, n + 1) for _ in range(k)])
    assert seq_count(B, n) == k * n
    with pytest.raises(ValueError):
        SeqPrefix((2, 1))
    with pytest.raises(ValueError):
        SeqPrefix((0, 1))
    with pytest.raises(ValueError):
        seq_count(A, 0)


def test_text_format_roundtrip(tmp_path):
    text = "# a comment\n5\n\n 2  # trailing\n5\n"
    assert parse_ints(text) == [5, 2, 5]
    with pytest.raises(ValueError, match="line 2"):
        parse_ints("1\nx\n")
    p = tmp_path / "s.txt"
    write_set(p, [4, 1, 9], header="demo")
    assert p.read_text().startswith("# demo\n")
    assert read_set(p).tolist() == [1, 4, 9]
    assert read_seq(p).elements == (1, 4, 9)
    assert format_ints([1, 2]) == "1\n2\n"
