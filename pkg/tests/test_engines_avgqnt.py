import random
from collections import Counter
from fractions import Fraction

from helpers import db, facts, queries_at_least, random_database, random_tau, subsets_by_size
from shapq.aggregates import AVG, MEDIAN, AggregateQuery, ConstantVF, Identity, quantile, value_bag
from shapq.cq import HierarchyClass as H, parse_cq
from shapq.engines.avgqnt import (
    avg_single_relation_closed, avgqnt_shapley, f_q, quintuple_table, sumk_avg, sumk_qnt)
from shapq.engines.boolean import boolean_shapley
from shapq.game import shapley_bruteforce, sumk_bruteforce

QX = parse_cq("Q(x) :- R(x).")


def test_quintuple_entries():
    kind, d = quintuple_table(AggregateQuery(AVG, Identity(1), QX), db(["R(1)", "R(2)"]))
    assert kind == "A"
    assert d[1][(0, 1, 0)][1] == 1
    assert d[1][(0, 0, 1)][1] == 1


def test_quintuples_count_rank_statistics():
    rng = random.Random(29)
    pool = queries_at_least(H.QHierarchical, boolean=False)
    for _ in range(60):
        q = rng.choice(pool)
        A = AggregateQuery(AVG, random_tau(rng, q), q)
        D = random_database(rng, q, max_endo=8)
        _, d = quintuple_table(A, D)
        want = Counter()
        for k, E in subsets_by_size(D):
            bag = value_bag(A, E)
            for a in d:
                lt = sum(c for v, c in bag.items() if v < a)
                gt = sum(c for v, c in bag.items() if v > a)
                want[(a, (lt, bag[a], gt), k)] += 1
        got = Counter({(a, t, k): c for a, row in d.items() for t, counts in row.items()
                       for k, c in enumerate(counts) if c})
        assert got == want


def test_sumk_avg_example():
    D = db(["R(0)", "R(1)"])
    s = sumk_avg(quintuple_table(AggregateQuery(AVG, Identity(1), QX), D))
    assert s[1:] == [1, Fraction(1, 2)]


def test_quantile_weights():
    half = Fraction(1, 2)
    assert f_q(half, 0, 1, 0) == 1
    assert f_q(half, 1, 1, 2) == half
    bag = [1, 2, 3, 4]
    assert sum(a * f_q(half, i, 1, 3 - i) for i, a in enumerate(bag)) == Fraction(5, 2)


def test_avg_example():
    D = db(["R(0)", "R(1)"])
    r0, r1 = facts("R(0)", "R(1)")
    A = AggregateQuery(AVG, Identity(1), QX)
    assert avgqnt_shapley(A, D, r0) == Fraction(-1, 4)
    assert avgqnt_shapley(A, D, r1) == Fraction(3, 4)
    assert avg_single_relation_closed(D, Identity(1), r1) == Fraction(3, 4)


def test_closed_avg_is_efficient():
    rng = random.Random(31)
    for _ in range(30):
        vals = rng.sample(range(-5, 20), rng.randint(1, 8))
        D = db([f"R({v})" for v in vals])
        total = sum(avg_single_relation_closed(D, Identity(1), f) for f in D.endo)
        assert total == Fraction(sum(vals), len(vals))


def test_constant_tau_scales_boolean():
    rng = random.Random(37)
    for _ in range(30):
        q = rng.choice(queries_at_least(H.QHierarchical, boolean=False))
        D = random_database(rng, q, max_endo=7)
        alpha = rng.choice([AVG, MEDIAN, quantile(Fraction(1, 4))])
        A = AggregateQuery(alpha, ConstantVF(Fraction(-3)), q)
        for f in D.endo:
            assert avgqnt_shapley(A, D, f) == -3 * boolean_shapley(q.boolean(), D, f)


def test_sumk_matches_bruteforce():
    rng = random.Random(41)
    pool = queries_at_least(H.QHierarchical, boolean=False)
    for _ in range(40):
        q = rng.choice(pool)
        A = AggregateQuery(AVG, random_tau(rng, q), q)
        D = random_database(rng, q, max_endo=8)
        t = quintuple_table(A, D)
        assert sumk_avg(t, len(D.endo)) == sumk_bruteforce(A, D)
        Q = A.with_alpha(quantile(Fraction(2, 5)))
        assert sumk_qnt(t, Fraction(2, 5), len(D.endo)) == sumk_bruteforce(Q, D)


def test_median_is_half_quantile():
    rng = random.Random(43)
    q = parse_cq("Q(x,y) :- R(x,y), S(x).")
    for _ in range(20):
        D = random_database(rng, q, max_endo=8)
        A = AggregateQuery(MEDIAN, Identity(2), q)
        for f in D.endo:
            assert avgqnt_shapley(A, D, f) == avgqnt_shapley(A.with_alpha(quantile(Fraction(1, 2))), D, f)


def test_quantiles_match_bruteforce():
    rng = random.Random(47)
    pool = queries_at_least(H.QHierarchical, boolean=False)
    for q_ in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        for _ in range(25):
            q = rng.choice(pool)
            A = AggregateQuery(quantile(q_), random_tau(rng, q), q)
            D = random_database(rng, q, max_endo=8)
            for f in D.endo:
                assert avgqnt_shapley(A, D, f) == shapley_bruteforce(A, D, f)
