"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line."""
import math
import random
import time
from contextlib import contextmanager
from itertools import combinations
from math import gcd
from pathlib import Path

import numpy as np
import pytest

import oracles
from sumsetlab.completeness import glue_gap2_to_ap
from sumsetlab.constructions import build_general, build_planar, verify_extremal
from sumsetlab.core import IntSet, ResidueSet
from sumsetlab.gap import Gap, collapse_profile, gap_enumerate, gap_is_proper, verify_gap_in_set
from sumsetlab.harness import format_csv, read_config, threshold_sweep
from sumsetlab.lemma_lab import greedy_big_sum_subset, pair_representation_counts
from sumsetlab.structure import filling_probe, find_proper_gap, longest_ap, rank_reduction_probe
from sumsetlab.sumsets import SumCap, distinct_sumset, iterated_sumset, star_sum
from sumsetlab.zerosumfree import count_zero_sum_free, n_small_count, n_small_exponent

DEMOS = Path(__file__).resolve().parent.parent / "demos"


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(num, title, limit):
        t0 = time.perf_counter()
        status = "FAIL"
        try:
            yield
            secs = time.perf_counter() - t0
            assert secs < limit, f"took {secs:.1f} s, limit {limit} s"
            status = "PASS"
        finally:
            secs = time.perf_counter() - t0
            with capsys.disabled():
                print(f"\ncriterion {num:2d} {status}  {title}  ({secs:.1f} s)")
    return run


def same_ap(run, want):
    length, d, start = want
    if length == 1:
        return run.length == 1
    return (run.length, run.diff, run.start) == want


def test_c01_interval_exactness(criterion):
    with criterion(1, "interval sumsets and their longest AP are exact", 1):
        for m in (10, 100, 1000):
            A = IntSet.interval(1, m)
            for l in (2, 8, 64):
                lA = iterated_sumset(A, l)
                assert lA == IntSet.interval(l, l * m)
                assert longest_ap(lA).length == l * m - l + 1


def test_c02_sudden_jump(criterion):
    with criterion(2, "planar construction vs interval at n = 10^6", 60):
        n, m = 10**6, 20
        l = int(n // (4.1 * m * m))
        A, params = build_planar(n, m)
        rep = verify_extremal(A, params, l)
        assert len(A) == m * m and rep.card_ok
        planar = rep.ap.length
        assert planar <= l * m == l * math.isqrt(len(A))
        I = IntSet.interval(1, len(A))
        big_l = -(-2 * n // len(I))
        assert big_l * len(I) >= 2 * n
        interval = longest_ap(iterated_sumset(I, big_l)).length
        assert interval == big_l * len(I) - big_l + 1
        # per summand the interval grows by |A| - 1 and the planar set by at most m
        assert (interval / big_l) / (planar / l) >= m / 2
        same_l = longest_ap(iterated_sumset(I, l)).length
        assert same_l == l * len(I) - l + 1 and same_l >= (m / 2) * planar


GENERAL_POINTS = {
    2: [(10**5, 5, 6), (10**6, 10, 8), (10**6, 10, 20), (10**6, 15, 8), (10**6, 20, 4)],
    3: [(10**7, 5, 4), (10**7, 6, 8), (10**7, 4, 10), (10**8, 8, 12), (10**8, 10, 8)],
}


def test_c03_general_construction(criterion):
    with criterion(3, "general construction passes verification, d = 2 and 3", 120):
        for d, pts in GENERAL_POINTS.items():
            assert len(pts) >= 5
            for n, m, l in pts:
                A, params = build_general(d, n, m, l=l)
                rep = verify_extremal(A, params, l)
                assert len(A) == m ** d and rep.card_ok
                assert rep.ap_ok and rep.ap.length <= l * m and rep.passed, (d, n, m, l)


def test_c04_mod_p_laws(criterion):
    with criterion(4, "Cauchy-Davenport and Erdos-Heilbronn over all subsets", 60):
        for p in (5, 7, 11, 13):
            cap = SumCap(modulus=p)
            subsets = [A for r in range(1, p + 1) for A in combinations(range(p), r)]
            for A in subsets:
                R = ResidueSet.of(A, p)
                k = len(A)
                assert len(iterated_sumset(R, 2, cap)) >= min(p, 2 * k - 1)
                if k >= 2:
                    assert len(distinct_sumset(R, 2, cap)) >= min(p, 2 * k - 3)
            if p <= 7:
                ints = [IntSet(A) for A in subsets]
                for A in ints:
                    for B in ints:
                        AB = {x % p for x in (A + B).tolist()}
                        assert len(AB) >= min(p, len(A) + len(B) - 1)


def test_c05_oracle_equivalence(criterion):
    with criterion(5, "distinct, star, longest AP, rep counts equal brute force", 120):
        rng = random.Random(501)
        for _ in range(1000):
            A = rng.sample(range(80), rng.randint(1, 12))
            l = rng.randint(1, len(A))
            assert distinct_sumset(IntSet(A), l).tolist() == sorted(oracles.distinct(A, l))
        for _ in range(1000):
            sets = [rng.sample(range(15), rng.randint(1, 9)) for _ in range(rng.randint(1, 3))]
            assert star_sum([IntSet(s) for s in sets]).tolist() == sorted(oracles.star(sets))
        for _ in range(1000):
            span = rng.randint(1, 300)
            xs = rng.sample(range(span + 1), rng.randint(1, min(span + 1, 60)))
            assert same_ap(longest_ap(IntSet(xs)), oracles.longest_ap(xs))
        for _ in range(1000):
            A = rng.sample(range(300), rng.randint(1, 40))
            assert pair_representation_counts(IntSet(A)).as_dict() == oracles.rep_counts(A)
        # every GAP returned is a proper GAP inside the input
        for _ in range(300):
            S = IntSet(rng.sample(range(400), rng.randint(2, 200)))
            G = find_proper_gap(S, budget=20000)
            if G is not None:
                assert gap_is_proper(G)[0] and verify_gap_in_set(G, S)


def test_c06_greedy(criterion):
    with criterion(6, "greedy subset with a large distinct sumset", 300):
        rng = np.random.default_rng(601)
        # below about 1000 elements |A| >= 100 log2 |A| is false; the postconditions still hold
        for _ in range(100):
            k = int(2 ** rng.uniform(7, 12))
            A = IntSet(rng.choice(np.arange(1, 50 * k), size=k, replace=False))
            r = greedy_big_sum_subset(A)
            assert len(r.B) <= 20 * math.log2(len(A))
            assert len(r.sums) >= len(A) and r.size_ok and r.sum_ok
            assert all(b >= 1.1 * a for a, b in zip(r.steps, r.steps[1:]))


def test_c07_gluing(criterion):
    with criterion(7, "rank-2 GAPs glue into one long AP", 60):
        rng = random.Random(701)
        done = 0
        while done < 500:
            a1, a2 = rng.randint(1, 12), rng.randint(1, 12)
            P = Gap(rng.randint(0, 30), (a1, a2),
                    (rng.randint(5 * a2, 5 * a2 + 40), rng.randint(5 * a1, 5 * a1 + 40)))
            if P.box_size > 10**4:
                continue
            run = glue_gap2_to_ap(P)
            img = gap_enumerate(P)
            assert all(t in img for t in run.terms())
            assert run.diff == gcd(a1, a2) and run.length >= sum(P.lengths)
            done += 1


def test_c08_zero_sum_free(criterion):
    with criterion(8, "zero-sum-free counts and n-small sets", 300):
        for p in (5, 7, 11, 13):
            rep = count_zero_sum_free(p)
            assert (rep.count, rep.max_size) == oracles.count_zsf(p)
        for p in [q for q in range(2, 32) if all(q % r for r in range(2, q))]:
            assert count_zero_sum_free(p).max_size <= math.floor(2 * math.sqrt(p))
        q = [oracles.distinct_partitions(i) for i in range(100)]
        for n in range(1, 101):
            assert n_small_count(n) == sum(q[:n])
        e = [n_small_exponent(n) for n in (400, 900, 1600)]
        assert e[0] < e[1] < e[2] <= 2.7


def classes():
    # non-proper rank-2 GAPs with lengths <= 8, up to translation, scaling and sign of a1
    for a in range(1, 9):
        for b in range(1, 9):
            if gcd(a, b) != 1:
                continue
            for n1 in range(b, 9):
                for n2 in range(a, 9):
                    yield Gap(0, (a, b), (n1, n2))
                    yield Gap(0, (a, -b), (n1, n2))


def test_c09_structure_probes(criterion):
    with criterion(9, "collapse, filling and rank-reduction probes", 300):
        seen = 0
        for Q in classes():
            assert not gap_is_proper(Q)[0]
            ratios = collapse_profile(Q, 64, method="lattice")
            assert all(x >= y for x, y in zip(ratios, ratios[1:]))
            assert min(ratios) < 0.5
            assert ratios[:4] == collapse_profile(Q, 4)
            seen += 1
        assert seen == 1896
        rng = random.Random(901)
        for _ in range(20):
            P = Gap(0, (1,), (99,))
            B = IntSet(sorted(rng.sample(range(100), 50)))
            res = filling_probe(B, P, h_max=8, gamma=0.4)
            assert res is not None
            assert gap_is_proper(res.gap)[0] and verify_gap_in_set(res.gap, iterated_sumset(B, res.h))
        for k in (5, 9, 16, 25):
            rep = rank_reduction_probe(Gap(0, (1, k), (k - 1, 1)), g_max=4)
            g = rep.best_g
            assert rep.best_run.contained_in(gap_enumerate(Gap(0, (1, k), (g * (k - 1), g))))
            assert rep.best_ratio >= 1.0


def test_c10_performance(criterion):
    with criterion(10, "engine speed, 8-worker sweep time and reproducible CSV", 600 + 5):
        rng = np.random.default_rng(1001)
        A = IntSet(rng.choice(np.arange(1, 10**6 + 1), size=1000, replace=False))
        t0 = time.perf_counter()
        lA = iterated_sumset(A, 1024)
        engine = time.perf_counter() - t0
        assert lA.min() == 1024 * A.min() and lA.max() == 1024 * A.max()
        assert engine <= 2, f"iterated sumset took {engine:.2f} s"
        cfg = read_config(DEMOS / "sweep_1e6.cfg")
        t0 = time.perf_counter()
        recs = threshold_sweep(cfg, workers=8)
        sweep = time.perf_counter() - t0
        assert len(recs) == 100
        assert sweep <= 600, f"sweep took {sweep:.0f} s"
        # the frozen file comes from a serial run with the same seed
        assert format_csv(recs, cfg.timing) == (DEMOS / "sweep_1e6.csv").read_text()
