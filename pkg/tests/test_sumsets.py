import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from sumsetlab.core import IntSet, ResidueSet, SeqPrefix, sumset
from sumsetlab.errors import CapExceeded, PreconditionError
from sumsetlab.sumsets import (SumCap, distinct_sumset, iterated_sumset, star_sum, star_sum_sample,
                               subset_sums)


def test_interval_iterated():
    for m in (1, 5, 37):
        for l in (1, 2, 3, 10):
            assert iterated_sumset(IntSet.interval(1, m), l) == IntSet.interval(l, l * m)


def test_iterated_l1_and_empty():
    A = IntSet([2, 5, 11])
    assert iterated_sumset(A, 1) == A
    assert len(iterated_sumset(IntSet([]), 4)) == 0
    with pytest.raises(PreconditionError):
        iterated_sumset(A, 0)


def test_iterated_vs_oracle():
    rng = random.Random(11)
    for _ in range(400):
        A = rng.sample(range(60), rng.randint(1, 12))
        l = rng.randint(1, 4)
        assert iterated_sumset(IntSet(A), l).tolist() == sorted(oracles.iterated(A, l))


def test_iterated_mod_vs_oracle():
    rng = random.Random(12)
    for _ in range(300):
        n = rng.randint(2, 40)
        A = rng.sample(range(n), rng.randint(1, min(n, 8)))
        l = rng.randint(1, 5)
        R = iterated_sumset(ResidueSet.of(A, n), l, SumCap(modulus=n))
        assert isinstance(R, ResidueSet)
        assert R.members == sorted(oracles.iterated(A, l, n))


def test_iterated_cap():
    with pytest.raises(CapExceeded):
        iterated_sumset(IntSet([0, 1000]), 8, SumCap(max_universe=7999))
    assert iterated_sumset(IntSet([0, 1000]), 8, SumCap(max_universe=8000)).max() == 8000


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(0, 300), min_size=1, max_size=25), st.integers(1, 8))
def test_doubling_consistency(a, l):
    A = IntSet(a)
    lA = iterated_sumset(A, l)
    assert iterated_sumset(A, 2 * l) == sumset(lA, lA)


def test_distinct_examples():
    assert distinct_sumset(IntSet([1, 2, 3]), 2).tolist() == [3, 4, 5]
    A = IntSet([4, 9, 30, 31])
    assert distinct_sumset(A, 4).tolist() == [74]
    R = distinct_sumset(ResidueSet.of([1, 2, 3, 4], 11), 2, SumCap(modulus=11))
    assert len(R) == 5 == 2 * 4 - 3
    with pytest.raises(PreconditionError):
        distinct_sumset(IntSet([1, 2]), 3)


def test_distinct_vs_oracle():
    rng = random.Random(13)
    for _ in range(400):
        A = rng.sample(range(80), rng.randint(1, 12))
        l = rng.randint(1, len(A))
        assert distinct_sumset(IntSet(A), l).tolist() == sorted(oracles.distinct(A, l))


def test_distinct_mod_vs_oracle():
    rng = random.Random(14)
    for _ in range(200):
        n = rng.randint(2, 30)
        A = rng.sample(range(n), rng.randint(1, min(n, 9)))
        l = rng.randint(1, len(A))
        R = distinct_sumset(ResidueSet.of(A, n), l, SumCap(modulus=n))
        assert R.members == sorted(oracles.distinct(A, l, n))


@settings(max_examples=50, deadline=None)
@given(st.sets(st.integers(0, 100), min_size=1, max_size=14), st.data())
def test_distinct_inside_iterated(a, data):
    l = data.draw(st.integers(1, len(a)))
    A = IntSet(a)
    assert distinct_sumset(A, l) <= iterated_sumset(A, l)


def test_star_examples():
    assert star_sum([IntSet([1, 2]), IntSet([1, 2])]).tolist() == [3]
    sets = [IntSet([0, 1]), IntSet([10, 11]), IntSet([100, 105])]
    plain = sumset(sumset(sets[0], sets[1]), sets[2])
    assert star_sum(sets) == plain
    assert len(star_sum([IntSet([1]), IntSet([1])])) == 0


def test_star_vs_oracle():
    rng = random.Random(15)
    for _ in range(400):
        l = rng.randint(1, 3)
        sets = [rng.sample(range(15), rng.randint(1, 10)) for _ in range(l)]
        got = star_sum([IntSet(s) for s in sets]).tolist()
        assert got == sorted(oracles.star(sets))


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(0, 40), min_size=1, max_size=10), st.data())
def test_star_of_copies_is_distinct_sumset(a, data):
    l = data.draw(st.integers(1, min(4, len(a))))
    A = IntSet(a)
    assert star_sum([A] * l) == distinct_sumset(A, l)


def test_star_caps_and_sampling():
    A = IntSet(range(100))
    with pytest.raises(CapExceeded, match="star_sum_sample"):
        star_sum([A] * 5)
    with pytest.raises(CapExceeded):
        star_sum([IntSet([1])] * 9)
    exact = star_sum([A] * 3)
    sample = star_sum_sample([A] * 3, samples=500, seed=2)
    assert sample.lower_bound and sample.samples == 500
    assert sample.sums <= exact
    again = star_sum_sample([A] * 3, samples=500, seed=2)
    assert again.sums == sample.sums


def test_star_mod():
    R = star_sum([IntSet([1, 2, 6]), IntSet([1, 4])], SumCap(modulus=5))
    assert R.members == sorted({(a + b) % 5 for a in (1, 2, 6) for b in (1, 4) if a != b})


def test_subset_sums_examples():
    assert subset_sums(IntSet([1, 2, 4])) == IntSet.interval(0, 7)
    assert subset_sums(IntSet([3, 5])).tolist() == [0, 3, 5, 8]
    assert subset_sums(SeqPrefix((2, 2, 2))).tolist() == [0, 2, 4, 6]
    assert subset_sums(IntSet([])).tolist() == [0]


def test_subset_sums_vs_oracle():
    rng = random.Random(16)
    for _ in range(300):
        vals = sorted(rng.choice(range(1, 30)) for _ in range(rng.randint(0, 12)))
        assert subset_sums(SeqPrefix(tuple(vals))).tolist() == sorted(oracles.subset_sums(vals))


def test_subset_sums_mod_and_cap():
    R = subset_sums(SeqPrefix((3, 3, 3, 3)), SumCap(modulus=7))
    assert R.members == sorted({(3 * k) % 7 for k in range(5)})
    with pytest.raises(CapExceeded):
        subset_sums(SeqPrefix((10, 10)), SumCap(max_universe=19))
