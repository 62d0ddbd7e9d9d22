import random
from fractions import Fraction

import pytest

from shapq.aggregates import AVG, DUP, MAX, MEDIAN, AggregateQuery, GreaterThan, Identity, ReLU, evaluate, exogenous_part
from shapq.cq import parse_cq
from shapq.errors import NonInjectiveOnDomain, OutOfRange, PreconditionViolated
from shapq.gadgets import (
    SAMPLE_COVER, Q_XYY, SetCoverInstance, avg_setcover_query, build_avg_setcover_db,
    build_dup_permanent_db, build_qnt_setcover_db, count_set_covers, cover_counts_by_enumeration,
    embed_qxyy, matching_counts, monotone_push, permanent, push_fact, qnt_setcover_query,
    recover_cover_counts_avg, recover_matching_counts_dup, recover_permanent_dup,
    setcover_game_shapley, shifted_table)
from shapq.game import shapley_bruteforce_all
from shapq.model import Database, Fact


def S(b):
    return Fact("S", (b,))


def test_set_cover_instance_validation():
    assert SAMPLE_COVER.m == 3
    assert SAMPLE_COVER.covered([0, 1]) == {1, 2, 3, 4}
    with pytest.raises(OutOfRange):
        SetCoverInstance(2, ({1, 3},))


def test_sample_cover_database_shape():
    D, f = build_avg_setcover_db(SAMPLE_COVER, 2, 2)
    assert f == S(0) and f in D.endo
    R = [g for g in D.facts if g.relation == "R"]
    assert len(R) == 12 and all(g in D.exo for g in R)
    assert sorted(g.args[0] for g in D.endo) == [0, 1, 2, 3, 5, 6]
    assert S(4) in D.exo


def test_sample_cover_coalitions():
    A = avg_setcover_query()
    D, _ = build_avg_setcover_db(SAMPLE_COVER, 2, 2)
    base = exogenous_part(D)
    # the coalition printed as E1 covers only {1,2,3}
    assert evaluate(A, base.with_facts(exo=[S(1), S(3), S(6)])) == Fraction(1, 7)
    assert evaluate(A, base.with_facts(exo=[S(1), S(2), S(6)])) == Fraction(1, 8)
    assert evaluate(A, base.with_facts(exo=[S(1), S(3)])) == 0
    assert evaluate(A, base.with_facts(exo=[S(1), S(3), S(0)])) == Fraction(1, 7)


def test_cover_counts_recovered():
    Z = recover_cover_counts_avg(SAMPLE_COVER)
    assert Z == cover_counts_by_enumeration(SAMPLE_COVER)
    assert sum(Z[SAMPLE_COVER.n]) == count_set_covers(SAMPLE_COVER) == 2
    small = SetCoverInstance(2, ({1}, {1, 2}))
    assert recover_cover_counts_avg(small) == cover_counts_by_enumeration(small)


def test_qnt_gadget_reproduces_cover_game():
    rng = random.Random(61)
    for _ in range(6):
        n = rng.randint(1, 3)
        subsets = tuple({x for x in range(1, n + 1) if rng.random() < 0.5} or {1} for _ in range(rng.randint(1, 4)))
        inst = SetCoverInstance(n, subsets)
        for q in (Fraction(1, 3), Fraction(1, 2)):
            A = qnt_setcover_query(q)
            D = build_qnt_setcover_db(inst, q)
            vals = shapley_bruteforce_all(A, D, override=True)
            for i in range(1, inst.m + 1):
                assert vals[S(i)] == setcover_game_shapley(inst, i)
    with pytest.raises(OutOfRange):
        build_qnt_setcover_db(SAMPLE_COVER, 1)


def test_permanent_recovery():
    M = [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    assert permanent(M) == 2
    assert recover_matching_counts_dup(M) == matching_counts(M)
    assert recover_permanent_dup(M) == 2
    assert recover_permanent_dup([[1, 0], [0, 1]]) == 1
    D, f = build_dup_permanent_db(M, 0)
    assert f == S(0) and len(D.endo) == 7


def test_relu_variant_does_not_recover_matchings():
    # sets sharing only a negative element collapse to value 0 and collide
    M = [[1, 1], [1, 1]]
    assert recover_matching_counts_dup(M, "relu") != matching_counts(M)


EMBED_TARGETS = ["Q(x) :- R(x,y), S(y).", "Q(w,x) :- A(x,y), B(y), C(w).",
                 "Q(x) :- A(x,y,z), B(y,z), C(z)."]


@pytest.mark.parametrize("target", EMBED_TARGETS)
def test_embedding_preserves_values(target):
    rng = random.Random(target)
    Q0 = parse_cq(target)
    for _ in range(8):
        facts = {Fact("R", (rng.randint(0, 2), rng.randint(0, 2))) for _ in range(4)}
        facts |= {Fact("S", (rng.randint(0, 2),)) for _ in range(3)}
        endo = [f for f in sorted(facts, key=Fact.sort_key) if rng.random() < 0.7]
        D = Database.build(endo, facts - set(endo), {"R": 2, "S": 1})
        E = embed_qxyy(Q0, D)
        for alpha in (AVG, DUP):
            A = AggregateQuery(alpha, Identity(1), Q_XYY)
            A0 = E.aggregate_query(A)
            src = shapley_bruteforce_all(A, D)
            dst = shapley_bruteforce_all(A0, E.database)
            assert {f: dst[E.h[f]] for f in D.endo} == src


def test_embedding_rejects_q_hierarchical_targets():
    with pytest.raises(PreconditionViolated):
        embed_qxyy(parse_cq("Q(x) :- R(x,y), S(x)."), Database.build([], [], {"R": 2, "S": 1}))


def test_monotone_push():
    q = parse_cq("Q(x) :- R(x,y), S(y).")
    D = Database.build([Fact("R", (1, 2)), Fact("S", (2,))], [Fact("R", (3, 2))])
    g = {1: 1, 3: 3}
    assert monotone_push(D, q, 1, g) == D
    P = monotone_push(D, q, 1, {1: 10, 3: 30})
    assert Fact("R", (10, 2)) in P.endo and Fact("R", (30, 2)) in P.exo
    with pytest.raises(NonInjectiveOnDomain):
        monotone_push(D, q, 1, {1: 5, 3: 5})
    with pytest.raises(PreconditionViolated):
        monotone_push(D, q, 1, {1: 5})
    assert shifted_table(GreaterThan(Fraction(0), 1), [-1, 0, 1]) == {-1: -1, 0: 0, 1: 2}


def test_monotone_identity_example():
    q = parse_cq("Q(x) :- R(x,y), S(y).")
    D = Database.build([Fact("R", (1, 2)), Fact("S", (2,)), Fact("R", (-1, 2))], [Fact("R", (3, 2))])
    gamma = ReLU(1)
    table = shifted_table(gamma, [-1, 1, 3])
    for alpha in (MAX, MEDIAN):
        lhs = shapley_bruteforce_all(AggregateQuery(alpha, gamma, q), D)
        base = shapley_bruteforce_all(AggregateQuery(alpha, Identity(1), q), D)
        pushed = shapley_bruteforce_all(AggregateQuery(alpha, Identity(1), q), monotone_push(D, q, 1, table))
        for f in D.endo:
            assert lhs[f] == pushed[push_fact(f, q, 1, table)] - base[f]
