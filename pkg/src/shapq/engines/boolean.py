"""P⁰/P¹ subset counts, Boolean Shapley values, membership, Sum/Count and CDist."""
from __future__ import annotations

from fractions import Fraction

from ..aggregates import (
    AggregateQuery,
    answers,
    tau_atom_index,
    tau_value_of_fact,
)
from ..counting import Packer
from ..cq import (
    ConjunctiveQuery,
    classify,
    is_all_hierarchical,
    is_exists_hierarchical,
    is_q_hierarchical,
    substitute,
)
from ..dp import Plugin, combine, generic_dp
from ..errors import (
    FactNotEndogenous,
    NotAllHierarchical,
    NotExistsHierarchical,
    NotQHierarchical,
    PreconditionViolated,
    SelfJoin,
)
from ..game import shapley_via_sumk
from ..model import Database, Fact


class EmptinessPlugin(Plugin):
    """Key 0: no answers, key 1: at least one answer."""

    def leaf(self, tau, sat, unsat):
        return {k: p for k, p in ((0, unsat), (1, sat)) if p}

    def union(self, t1, t2, free):
        return combine(t1, t2, lambda a, b: a | b)

    def cross(self, t1, t2):
        return combine(t1, t2, lambda a, b: a & b)


class AnswerCountPlugin(Plugin):
    """Key = number of answers, capped at 2 ("two or more").

    Adding counts across a root split is only sound when the root is free
    (the two sides have disjoint answers) or the query is Boolean (at most
    one answer on each side, so the union is an OR)."""

    def leaf(self, tau, sat, unsat):
        return {k: p for k, p in ((0, unsat), (1, sat)) if p}

    def union(self, t1, t2, free):
        if free:
            return combine(t1, t2, lambda a, b: min(2, a + b))
        return combine(t1, t2, lambda a, b: min(a + b, 1))

    def cross(self, t1, t2):
        return combine(t1, t2, lambda a, b: min(2, a * b))


def _check_self_join(q: ConjunctiveQuery) -> None:
    if q.has_self_join():
        raise SelfJoin(f"{q} repeats a relation symbol")


def _unpacked(table: dict, key, packer: Packer) -> list:
    return packer.unpack(table.get(key, 0))


def p0_table(q: ConjunctiveQuery, D: Database) -> list:
    """P⁰(k): number of k-subsets E of Dⁿ with Q(E ∪ Dˣ) empty."""
    P = Packer(len(D.endo))
    t = generic_dp(q, D, EmptinessPlugin(P))
    return _unpacked(t, 0, P)


def answer_count_tables(q: ConjunctiveQuery, D: Database) -> tuple:
    """(P⁰, P¹, P≥2) for a q-hierarchical or Boolean query."""
    _check_self_join(q)
    if not (q.is_boolean() and is_all_hierarchical(q)) and not is_q_hierarchical(q):
        raise NotQHierarchical(f"{q} is {classify(q).label()}")
    P = Packer(len(D.endo))
    t = generic_dp(q, D, AnswerCountPlugin(P), prefer_free_roots=True)
    return tuple(_unpacked(t, key, P) for key in (0, 1, 2))


def p1_table(q: ConjunctiveQuery, D: Database) -> list:
    """P¹(k): number of k-subsets E of Dⁿ with exactly one answer."""
    return answer_count_tables(q, D)[1]


def sumk_boolean(qb: ConjunctiveQuery, D: Database) -> list:
    """sum_k of the 0/1 game "Q is true": C(n,k) − P⁰(k)."""
    P = Packer(len(D.endo))
    t = generic_dp(qb, D, EmptinessPlugin(P))
    return _unpacked(t, 1, P)


def boolean_shapley(qb: ConjunctiveQuery, D: Database, f: Fact) -> Fraction:
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    _check_self_join(qb)
    if not is_all_hierarchical(qb):
        raise NotAllHierarchical(f"{qb} is not hierarchical")
    return shapley_via_sumk(lambda X: sumk_boolean(qb.boolean(), X), D, f)


def ground_head(q: ConjunctiveQuery, t: tuple) -> ConjunctiveQuery | None:
    """Boolean query with head variables fixed to t, or None if t is inconsistent."""
    if len(t) != len(q.head):
        raise PreconditionViolated(f"answer {t} does not match head arity {len(q.head)}")
    fixed: dict = {}
    for v, c in zip(q.head, t):
        if fixed.setdefault(v, c) != c:
            return None
    g = q
    for v, c in fixed.items():
        g = substitute(g, v, c)
    return ConjunctiveQuery((), g.body, q.name)


def membership_shapley(q: ConjunctiveQuery, D: Database, f: Fact, t: tuple) -> Fraction:
    """Shapley value of f in the game "t is an answer"."""
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    _check_self_join(q)
    if not is_exists_hierarchical(q):
        raise NotExistsHierarchical(f"{q} is {classify(q).label()}")
    g = ground_head(q, tuple(t))
    if g is None:
        return Fraction(0)
    return boolean_shapley(g, D, f)


def sumcount_shapley(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    """Sum/Count by linearity: Σ_t τ(t)·membership(t)."""
    if A.alpha.kind not in ("sum", "count"):
        raise PreconditionViolated("sumcount_shapley handles Sum and Count only")
    q = A.query
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    _check_self_join(q)
    if not is_exists_hierarchical(q):
        raise NotExistsHierarchical(f"{q} is {classify(q).label()}")
    if f.relation not in q.relations():
        return Fraction(0)
    total = Fraction(0)
    for t in sorted(answers(q, D), key=repr):
        w = Fraction(1) if A.alpha.kind == "count" else A.tau(t)
        if w:
            total += w * membership_shapley(q, D, f, t)
    return total


def value_restricted(A: AggregateQuery, D: Database, a: Fraction) -> Database:
    """D_a: drop the τ-relation facts that cannot produce value a."""
    q = A.query
    rel = q.body[tau_atom_index(q, A.tau)].relation

    def keep(g: Fact) -> bool:
        return g.relation != rel or tau_value_of_fact(q, A.tau, g) == a

    return Database(D.schema, frozenset(filter(keep, D.endo)), frozenset(filter(keep, D.exo)))


def cdist_shapley(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    """CDist as a sum of Boolean games, one per distinct value."""
    q = A.query
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    _check_self_join(q)
    if not is_all_hierarchical(q):
        raise NotAllHierarchical(f"{q} is {classify(q).label()}")
    qb = q.boolean()
    total = Fraction(0)
    for a in sorted({A.tau(t) for t in answers(q, D)}):
        Da = value_restricted(A, D, a)
        if f in Da.endo:
            total += boolean_shapley(qb, Da, f)
    return total


def _single_relation(D: Database, t: Fact) -> list:
    rels = {g.relation for g in D.facts}
    if D.exo or len(rels) != 1 or t not in D.endo:
        raise PreconditionViolated("closed formulas need one relation with all facts endogenous")
    return D.sorted_endo()


def cdist_single_relation_closed(D: Database, tau, t: Fact) -> Fraction:
    """1 / |{facts with the same τ value as t}| for Q(x⃗) ← R(x⃗)."""
    facts = _single_relation(D, t)
    v = tau(t.args)
    return Fraction(1, sum(1 for g in facts if tau(g.args) == v))
