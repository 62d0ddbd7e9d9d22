"""Has-duplicates over sq-hierarchical CQs."""
from __future__ import annotations

from fractions import Fraction

from ..aggregates import AggregateQuery, ValueFunction, head_tuple, homomorphisms, tau_atom_index
from ..counting import Packer
from ..cq import ConjunctiveQuery, HierarchyClass, classify, connected_components
from ..errors import NotConnectedSQ, NotSQHierarchical, PreconditionViolated, SelfJoin
from ..game import shapley_via_sumk
from ..model import Database, Fact, restrict_to_relations
from .boolean import answer_count_tables, p0_table


def _check_sq(q: ConjunctiveQuery) -> None:
    if q.has_self_join():
        raise SelfJoin(f"{q} repeats a relation symbol")
    if classify(q) != HierarchyClass.SQHierarchical:
        raise NotSQHierarchical(f"{q} is {classify(q).label()}")


def _check_connected_sq(q: ConjunctiveQuery) -> None:
    if q.has_self_join():
        raise SelfJoin(f"{q} repeats a relation symbol")
    if classify(q) != HierarchyClass.SQHierarchical or len(connected_components(q)) != 1:
        raise NotConnectedSQ(f"{q} is not a connected sq-hierarchical query")


def afact_partition(q: ConjunctiveQuery, D: Database, tau: ValueFunction) -> tuple:
    """Group the facts that take part in some homomorphism by the τ-value of
    the answer they belong to; everything else is residual.

    In a connected sq-hierarchical query every atom holds all head variables,
    so a fact fixes its answer and hence its value."""
    _check_connected_sq(q)
    rels = set(q.relations())
    value_of: dict = {}
    for binding, used in homomorphisms(q, [f for f in D.facts if f.relation in rels]):
        v = tau(head_tuple(q, binding))
        for f in used:
            if value_of.setdefault(f, v) != v:
                raise AssertionError(f"{f} contributes to answers with different values")
    groups: dict = {}
    for f, v in value_of.items():
        groups.setdefault(v, set()).add(f)
    parts = []
    for v in sorted(groups):
        fs = groups[v]
        parts.append((v, Database(D.schema, frozenset(fs & D.endo), frozenset(fs & D.exo))))
    rest = D.facts - set(value_of)
    residual = Database(D.schema, frozenset(rest & D.endo), frozenset(rest & D.exo))
    return parts, residual


def sumk_nodup_connected(q: ConjunctiveQuery, D: Database, tau: ValueFunction) -> list:
    """Number of k-subsets whose value bag has no repeated value, k = 0..n."""
    n = len(D.endo)
    P = Packer(n)
    parts, residual = afact_partition(q, D, tau)
    acc = P.binom(len(residual.endo))
    for _, Di in parts:
        p0, p1, _ = answer_count_tables(q, Di)
        acc *= P.pack([a + b for a, b in zip(p0, p1)])
    return P.unpack(acc)


def _complement(n: int, row: list) -> list:
    P = Packer(n)
    return P.unpack(P.binom(n) - P.pack(row))


def _conv(n: int, a: list, b: list) -> list:
    P = Packer(n)
    return P.unpack(P.pack(a) * P.pack(b))


def _sumk_dup_connected(q, D, tau) -> list:
    return _complement(len(D.endo), sumk_nodup_connected(q, D, tau))


def sumk_dup(A: AggregateQuery, D: Database) -> list:
    q, tau = A.query, A.tau
    _check_sq(q)
    comps = connected_components(q)
    home_rel = q.body[tau_atom_index(q, tau)].relation
    q1 = next(c for c in comps if home_rel in c.relations())
    tau1 = tau if tau.pos is None else tau.at(q1.head.index(q.head[tau.pos - 1]) + 1)
    n = len(D.endo)
    D1 = restrict_to_relations(D, set(q1.relations()) & set(D.schema))
    if len(comps) == 1:
        out = _sumk_dup_connected(q1, D1, tau1)
        extra = n - len(D1.endo)
        return [Fraction(c) for c in _conv(n, out, Packer(extra).unpack(Packer(extra).binom(extra)))]
    others = [c for c in comps if c is not q1]
    body2 = tuple(a for c in others for a in c.body)
    head2 = tuple(v for v in q.head if any(v in a.args for a in body2))
    q2 = ConjunctiveQuery(head2, body2, q.name)
    D2 = restrict_to_relations(D, set(q2.relations()) & set(D.schema))
    n1, n2 = len(D1.endo), len(D2.endo)
    ne1 = _complement(n1, p0_table(q1, D1))
    dup1 = _sumk_dup_connected(q1, D1, tau1)
    _, p1_2, many2 = answer_count_tables(q2, D2)
    m = n1 + n2
    out = [a + b for a, b in zip(_conv(m, ne1, many2), _conv(m, dup1, p1_2))]
    extra = n - m
    return [Fraction(c) for c in _conv(n, out, Packer(extra).unpack(Packer(extra).binom(extra)))]


def dup_shapley(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    if A.alpha.kind != "dup":
        raise PreconditionViolated("dup_shapley handles Dup only")
    _check_sq(A.query)
    return shapley_via_sumk(lambda X: sumk_dup(A, X), D, f)
