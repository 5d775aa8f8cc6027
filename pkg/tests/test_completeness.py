import random
from math import gcd

import pytest

from sumsetlab.completeness import (NetParams, ap_in_subset_sums, erdos_obstruction,
                                    glue_gap2_to_ap, good_partition_probe, graham_gap_check,
                                    is_dL_net)
from sumsetlab.core import IntSet, SeqPrefix
from sumsetlab.errors import PreconditionError
from sumsetlab.gap import Gap, gap_enumerate
from sumsetlab.sumsets import subset_sums


def test_obstruction_powers_of_two():
    rep = erdos_obstruction(SeqPrefix(tuple(2 ** i for i in range(1, 21))), tail_from=2)
    assert set(rep.g) == {2} and not rep.obstructed


def test_obstruction_powers_of_three():
    els = tuple(3 ** i for i in range(1, 31))
    rep = erdos_obstruction(SeqPrefix(els), tail_from=2)
    assert rep.g == [3 ** i - (3 ** i - 3) // 2 for i in range(2, 31)]
    assert rep.increasing and rep.obstructed


def test_obstruction_identity_sequence():
    rep = erdos_obstruction(SeqPrefix(tuple(range(1, 30))), tail_from=4)
    assert all(g < 0 for g in rep.g) and not rep.obstructed
    with pytest.raises(PreconditionError):
        erdos_obstruction(SeqPrefix((1, 2)), tail_from=5)


def test_graham_doubling_seed():
    Y = SeqPrefix((1, 1, 2, 4, 8, 16, 32, 64, 128, 256))
    rep = graham_gap_check(Y)
    assert rep.hypothesis and rep.L == 1


def test_graham_failure_and_interval():
    rep = graham_gap_check(SeqPrefix((1, 10, 100, 1000)))
    assert not rep.hypothesis and rep.first_failure == 1
    k = 20
    rep = graham_gap_check(SeqPrefix(tuple(range(1, k + 1))))
    assert rep.total == k * (k + 1) // 2 and rep.L == 1
    assert subset_sums(SeqPrefix(tuple(range(1, k + 1)))) == IntSet.interval(0, rep.total)


def test_nets():
    assert is_dL_net(IntSet([0, 2, 4, 6]), NetParams(2, 3))
    assert not is_dL_net(IntSet([0, 2, 5]), NetParams(2, 3))
    assert not is_dL_net(IntSet([0, 4, 8]), NetParams(2, 3))
    with pytest.raises(PreconditionError):
        is_dL_net(IntSet([1]), NetParams(1, 1))
    with pytest.raises(ValueError):
        NetParams(0, 3)


def check_glue(P):
    run = glue_gap2_to_ap(P)
    img = gap_enumerate(P)
    assert all(t in img for t in run.terms())
    assert run.diff == gcd(*P.diffs)
    assert run.length >= sum(P.lengths)
    return run


def test_glue_examples():
    run = check_glue(Gap(0, (4, 6), (30, 20)))
    assert run.diff == 2 and run.length >= 50
    run = check_glue(Gap(0, (1, 1), (5, 5)))
    assert (run.start, run.diff, run.length) == (0, 1, 11)


def test_glue_random_admissible():
    rng = random.Random(61)
    done = 0
    while done < 100:
        a1, a2 = rng.randint(1, 12), rng.randint(1, 12)
        l1 = rng.randint(5 * a2, 5 * a2 + 40)
        l2 = rng.randint(5 * a1, 5 * a1 + 40)
        P = Gap(rng.randint(0, 30), (a1, a2), (l1, l2))
        if P.box_size > 10**4:
            continue
        check_glue(P)
        done += 1


def test_glue_rejects_bad_hypothesis():
    with pytest.raises(PreconditionError):
        glue_gap2_to_ap(Gap(0, (4, 6), (10, 20)))
    with pytest.raises(PreconditionError):
        glue_gap2_to_ap(Gap(0, (4, -6), (30, 20)))
    with pytest.raises(PreconditionError):
        glue_gap2_to_ap(Gap(0, (4,), (30,)))


def test_subset_sum_ap_multiset():
    n, C = 50, 4
    A = SeqPrefix(tuple(v for v in range(1, n + 1) for _ in range(C)))
    res = ap_in_subset_sums(A, n)
    assert res.reaches and res.ap.length >= n


def test_subset_sum_ap_interval_and_parity():
    k = 12
    res = ap_in_subset_sums(IntSet(range(1, k + 1)), k * k // 2)
    assert res.ap.length == k * (k + 1) // 2 + 1 and res.ap.diff == 1
    res = ap_in_subset_sums(IntSet(range(2, 30, 2)), 10)
    assert res.ap.diff == 2


def test_complete_prefix_criterion():
    # a_(m+1) <= 1 + a_1 + ... + a_m makes S_A a full interval
    rng = random.Random(62)
    for _ in range(100):
        els = [1]
        for _ in range(rng.randint(1, 14)):
            els.append(rng.randint(els[-1], 1 + sum(els)))
        S = subset_sums(SeqPrefix(tuple(els)))
        assert S == IntSet.interval(0, sum(els))


def test_good_partition_dense_sequence():
    A = SeqPrefix(tuple(v for v in range(1, 41) for _ in range(3)))
    rep = good_partition_probe(A, depth=2)
    assert rep.stage == "complete"
    assert rep.stabilized_diff == 1
    diffs = [d for d, _ in rep.chain]
    assert all(b and a % b == 0 for a, b in zip(diffs, diffs[1:]))
    lengths = [n for _, n in rep.chain]
    assert lengths == sorted(lengths)


def test_good_partition_sparse_sequence():
    A = SeqPrefix(tuple(2 ** i for i in range(1, 25)))
    rep = good_partition_probe(A, depth=2)
    assert rep.a2_ok is not None
    js = rep.to_json()
    assert js["note"] == "finite-prefix proxy" and js["prefix_length"] == 24


def test_good_partition_short_prefix():
    rep = good_partition_probe(SeqPrefix((1, 2, 3)), depth=4)
    assert rep.stage.startswith("blocks")
