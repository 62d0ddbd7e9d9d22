import random
from collections import Counter
from fractions import Fraction
from math import comb

from helpers import db, facts, queries_at_least, random_database, random_tau, subsets_by_size
from shapq.aggregates import MAX, MIN, AggregateQuery, ConstantVF, Identity, value_bag
from shapq.cq import HierarchyClass as H, parse_cq
from shapq.engines.boolean import boolean_shapley
from shapq.engines.maxmin import (
    BOT, max_shapley, max_single_relation_closed, max_table, min_shapley, min_single_relation_closed)
from shapq.game import shapley_bruteforce

QX = parse_cq("Q(x) :- R(x).")


def test_max_table_example():
    t = max_table(AggregateQuery(MAX, Identity(1), QX), db(["R(1)", "R(2)"]))
    assert t == {BOT: [1, 0, 0], 1: [0, 1, 0], 2: [0, 1, 1]}


def test_boolean_variant_table():
    t = max_table(AggregateQuery(MAX, ConstantVF(Fraction(1)), parse_cq("Q() :- S(y).")), db(["S(1)"]))
    assert t == {BOT: [1, 0], 1: [0, 1]}


def test_table_partitions_subsets():
    rng = random.Random(17)
    pool = queries_at_least(H.AllHierarchical)
    for _ in range(80):
        q = rng.choice(pool)
        A = AggregateQuery(MAX, random_tau(rng, q), q)
        D = random_database(rng, q, max_endo=8)
        n = len(D.endo)
        t = max_table(A, D)
        for k in range(n + 1):
            assert sum(row[k] for row in t.values()) == comb(n, k)
        seen = Counter()
        for k, E in subsets_by_size(D):
            bag = value_bag(A, E)
            seen[(max(bag.elements()) if bag else BOT, k)] += 1
        got = Counter({(a, k): c for a, row in t.items() for k, c in enumerate(row) if c})
        assert got == seen


def test_max_and_min_examples():
    D = db(["R(1)", "R(2)"])
    r1, r2 = facts("R(1)", "R(2)")
    A = AggregateQuery(MAX, Identity(1), QX)
    assert (max_shapley(A, D, r1), max_shapley(A, D, r2)) == (Fraction(1, 2), Fraction(3, 2))
    B = AggregateQuery(MIN, Identity(1), QX)
    assert (min_shapley(B, D, r1), min_shapley(B, D, r2)) == (0, 1)
    assert max_single_relation_closed(D, Identity(1), r2) == Fraction(3, 2)
    assert min_single_relation_closed(D, Identity(1), r1) == 0


def test_constant_tau_scales_boolean():
    rng = random.Random(19)
    for _ in range(40):
        q = rng.choice(queries_at_least(H.AllHierarchical))
        D = random_database(rng, q, max_endo=8)
        c = Fraction(rng.randint(1, 5), rng.randint(1, 3))
        A = AggregateQuery(MAX, ConstantVF(c), q)
        for f in D.endo:
            assert max_shapley(A, D, f) == c * boolean_shapley(q.boolean(), D, f)
            assert min_shapley(A.with_alpha(MIN), D, f) == c * boolean_shapley(q.boolean(), D, f)


def test_engines_match_bruteforce():
    rng = random.Random(23)
    pool = queries_at_least(H.AllHierarchical)
    for _ in range(80):
        q = rng.choice(pool)
        A = AggregateQuery(rng.choice([MIN, MAX]), random_tau(rng, q), q)
        D = random_database(rng, q, max_endo=9)
        fn = max_shapley if A.alpha is MAX else min_shapley
        for f in D.endo:
            assert fn(A, D, f) == shapley_bruteforce(A, D, f)
