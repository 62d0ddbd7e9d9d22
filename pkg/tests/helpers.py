"""Shared fixtures-in-code: labeled query families, random instances and a
deliberately naive Shapley oracle used to cross-check the vectorized one."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import factorial

from shapq.aggregates import (
    AVG,
    CDIST,
    COUNT,
    DUP,
    MAX,
    MEDIAN,
    MIN,
    SUM,
    AggregateQuery,
    ConstantVF,
    GreaterThan,
    Identity,
    ReLU,
    evaluate,
    exogenous_part,
    quantile,
)
from shapq.cq import HierarchyClass, is_var, parse_cq
from shapq.model import Database, Fact

H = HierarchyClass

# twenty queries with their most specific class; every box has Boolean or non-Boolean members
LABELED = [
    ("Q(x) :- R(x,y), S(x).", H.SQHierarchical),
    ("Q(x,y) :- R(x,y).", H.SQHierarchical),
    ("Q() :- R(x), S(x,y).", H.SQHierarchical),
    ("Q(x,w) :- R(x), S(w,u).", H.SQHierarchical),
    ("Q(x) :- R(x,1), S(x).", H.SQHierarchical),
    ("Q() :- R(x), S(y).", H.SQHierarchical),
    ("Q(x,y) :- R(x,y), S(x).", H.QHierarchical),
    ("Q(x,y,z) :- R(x,y,z), S(x,y), T(x).", H.QHierarchical),
    ("Q(x,y) :- R(x,y,z), S(x).", H.QHierarchical),
    ("Q(y,x) :- R(x,y), S(x), T(w).", H.QHierarchical),
    ("Q(x) :- R(x,y), S(y).", H.AllHierarchical),
    ("Q(x) :- R(x,y), S(y,z).", H.AllHierarchical),
    ("Q(x,z) :- R(z,x,y), S(z,y).", H.AllHierarchical),
    ("Q(x) :- A(x,y,z), B(y,z), C(z).", H.AllHierarchical),
    ("Q(x,w) :- R(x,y), S(y), T(w).", H.AllHierarchical),
    ("Q(x,y) :- R(x), S(x,y), T(y).", H.ExistsHierarchical),
    ("Q(x,y) :- R(x,z), S(x,y), T(y).", H.ExistsHierarchical),
    ("Q(x) :- R(x), S(x,y), T(y).", H.ExistsHierarchical),
    ("Q() :- R(x), S(x,y), T(y).", H.NotExistsHierarchical),
    ("Q(x) :- R(x,y), S(y,z), T(z).", H.NotExistsHierarchical),
]

# more hierarchical Boolean queries for the Boolean engine
BOOLEAN_EXTRA = ["Q() :- R(x,y), S(x), T(z).", "Q() :- R(x,y), S(x,y).", "Q() :- R(x,2)."]

# engine tag -> (aggregates it serves, least class it needs)
ENGINE_SCOPE = {
    "sumcount": ([SUM, COUNT], H.ExistsHierarchical),
    "maxmin": ([MIN, MAX], H.AllHierarchical),
    "cdist": ([CDIST], H.AllHierarchical),
    "avgqnt": ([AVG, MEDIAN, quantile(Fraction(1, 3)), quantile(Fraction(2, 3))], H.QHierarchical),
    "dup": ([DUP], H.SQHierarchical),
}

ALL_AGGS = [SUM, COUNT, CDIST, MIN, MAX, AVG, MEDIAN, quantile(Fraction(1, 3)), DUP]


def queries_at_least(cls: HierarchyClass, boolean: bool | None = None) -> list:
    out = [parse_cq(s) for s, c in LABELED if c >= cls]
    if boolean is not None:
        out = [q for q in out if q.is_boolean() == boolean]
    return out


def random_tau(rng: random.Random, q):
    opts = [ConstantVF(Fraction(rng.randint(-2, 3)))]
    if q.head:
        i = rng.randint(1, len(q.head))
        opts += [Identity(i), Identity(i), ReLU(i), GreaterThan(Fraction(rng.randint(-1, 2)), i)]
    return rng.choice(opts)


def random_database(rng: random.Random, q, max_endo: int = 12, max_total: int = 30,
                    domain=(-1, 0, 1, 2, 3)) -> Database:
    facts = set()
    for a in q.body:
        for _ in range(rng.randint(2, 9)):
            facts.add(Fact(a.relation, tuple(rng.choice(domain) if is_var(t) else t
                                             for t in a.args)))
    facts = sorted(facts, key=Fact.sort_key)[:max_total]
    rng.shuffle(facts)
    endo = [f for f in facts if rng.random() < 0.65][:max_endo]
    exo = [f for f in facts if f not in endo]
    schema = {a.relation: len(a.args) for a in q.body}
    return Database(schema, frozenset(endo), frozenset(exo))


def naive_shapley(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    """Direct subset sum, one query evaluation per coalition."""
    others = [g for g in D.sorted_endo() if g != f]
    n = len(others) + 1
    base = exogenous_part(D)
    total = Fraction(0)
    for k in range(n):
        w = Fraction(factorial(k) * factorial(n - k - 1), factorial(n))
        for C in itertools.combinations(others, k):
            total += w * (evaluate(A, base.with_facts(exo=C + (f,)))
                          - evaluate(A, base.with_facts(exo=C)))
    return total


def naive_banzhaf(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    others = [g for g in D.sorted_endo() if g != f]
    base = exogenous_part(D)
    total = Fraction(0)
    for k in range(len(others) + 1):
        for C in itertools.combinations(others, k):
            total += (evaluate(A, base.with_facts(exo=C + (f,)))
                      - evaluate(A, base.with_facts(exo=C)))
    return total / 2 ** len(others)


def engine_corpus(tag: str, count: int, seed: int) -> list:
    """`count` random (A, D) pairs that dispatch routes to engine `tag`."""
    rng = random.Random(f"{tag}:{seed}")
    if tag == "boolean":
        pool = queries_at_least(H.SQHierarchical, boolean=True)
        pool += [parse_cq(s) for s in BOOLEAN_EXTRA]
        aggs = ALL_AGGS
    else:
        aggs, cls = ENGINE_SCOPE[tag]
        pool = queries_at_least(cls, boolean=False)
    out = []
    for _ in range(count):
        q = rng.choice(pool)
        A = AggregateQuery(rng.choice(aggs), random_tau(rng, q), q)
        out.append((A, random_database(rng, q)))
    return out


def facts(*texts) -> list:
    from shapq.manifest import parse_fact
    return [parse_fact(t) for t in texts]


def db(endo=(), exo=(), schema=None) -> Database:
    """Database from fact selector strings such as "R(1,2)"."""
    return Database.build(facts(*endo), facts(*exo), schema)


def subsets_by_size(D: Database):
    """Yield (k, coalition database) for every subset of Dⁿ."""
    base = exogenous_part(D)
    players = D.sorted_endo()
    for k in range(len(players) + 1):
        for C in itertools.combinations(players, k):
            yield k, base.with_facts(exo=C)


def answer_count_rows(q, D: Database) -> tuple:
    """(P0, P1, P>=2) rows by direct enumeration."""
    from shapq.aggregates import answers
    n = len(D.endo)
    rows = ([0] * (n + 1), [0] * (n + 1), [0] * (n + 1))
    for k, E in subsets_by_size(D):
        rows[min(len(answers(q, E)), 2)][k] += 1
    return rows
