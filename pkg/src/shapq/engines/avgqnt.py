"""Avg, Median and q-quantiles over q-hierarchical CQs.

For every value a of the final answer bag the table counts k-subsets by the
triple (ℓ<, ℓ=, ℓ>): how many bag elements are below, equal to, and above a."""
from __future__ import annotations

import math
from fractions import Fraction

from ..aggregates import AggregateQuery, answers
from ..counting import Packer
from ..cq import HierarchyClass, classify, is_q_hierarchical
from ..dp import Plugin, combine, generic_dp
from ..errors import NotQHierarchical, PreconditionViolated, SelfJoin, VariantMismatch
from ..game import shapley_via_sumk
from ..model import Database, Fact
from .boolean import _single_relation

ZERO = (0, 0, 0)


def _add(u, v):
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


def _or(u, v):
    return u if u != ZERO else v


class QuintuplePlugin(Plugin):
    """("A", {a: {(ℓ<,ℓ=,ℓ>): poly}}) for sub-queries holding the value atom,
    ("B", {ℓ: poly}) with ℓ the number of answers otherwise."""

    def __init__(self, packer: Packer, values: list, merge_sides: bool = False):
        super().__init__(packer)
        self.values = list(values)
        # Avg only needs ℓ= and the total, so ℓ< can be folded into ℓ>
        self.merge_sides = merge_sides

    def map_polys(self, t, fn):
        kind, d = t
        if kind == "B":
            return kind, {k: fn(p) for k, p in d.items()}
        return kind, {a: {k: fn(p) for k, p in row.items()} for a, row in d.items()}

    def empty(self, tau):
        if tau is None:
            return "B", {0: 1}
        return "A", {a: {ZERO: 1} for a in self.values}

    def leaf(self, tau, sat, unsat):
        if tau is None:
            return "B", {k: p for k, p in ((0, unsat), (1, sat)) if p}
        c = tau.of(None)
        out = {}
        for a in self.values:
            triple = (1, 0, 0) if c < a else (0, 1, 0) if c == a else (0, 0, 1)
            if self.merge_sides and triple[0]:
                triple = (0, 0, 1)
            out[a] = {k: p for k, p in ((ZERO, unsat), (triple, sat)) if p}
        return "A", out

    def union(self, t1, t2, free):
        (k1, d1), (k2, d2) = t1, t2
        if k1 != k2:
            raise AssertionError("root split mixed tables with and without the value atom")
        if k1 == "B":
            return "B", combine(d1, d2, (lambda a, b: a + b) if free else (lambda a, b: min(1, a + b)))
        op = _add if free else _or
        return "A", {a: combine(d1[a], d2[a], op) for a in self.values}

    def cross(self, t1, t2):
        (k1, d1), (k2, d2) = t1, t2
        if k1 == "A" and k2 == "A":
            raise AssertionError("value atom on both sides of a product")
        if k1 == "B" and k2 == "B":
            return "B", combine(d1, d2, lambda a, b: a * b)
        if k1 == "B":
            (k1, d1), (k2, d2) = t2, t1
        return "A", {a: combine(row, d2, lambda t, l: (t[0] * l, t[1] * l, t[2] * l))
                     for a, row in d1.items()}


def _check(A: AggregateQuery) -> None:
    q = A.query
    if q.has_self_join():
        raise SelfJoin(f"{q} repeats a relation symbol")
    if not (q.is_boolean() and classify(q) >= HierarchyClass.AllHierarchical) and not is_q_hierarchical(q):
        raise NotQHierarchical(f"{q} is {classify(q).label()}")


def _packed_table(A: AggregateQuery, D: Database, merge_sides: bool, headroom: bool) -> tuple:
    _check(A)
    ans = answers(A.query, D)
    values = sorted({A.tau(t) for t in ans})
    extra = 0
    if headroom and values:
        # room for weighted sums over all values in a single packed integer
        L = math.lcm(*(v.denominator for v in values))
        big = max(abs(v) * L for v in values) * (len(ans) + 1) * len(values) * 4
        extra = int(big).bit_length() + 1
    P = Packer(len(D.endo), extra)
    plugin = QuintuplePlugin(P, values, merge_sides)
    kind, d = generic_dp(A.query, D, plugin, prefer_free_roots=True, tau=A.tau)
    if kind != "A":
        raise AssertionError("top-level table lost the value atom")
    return P, d


def quintuple_table(A: AggregateQuery, D: Database) -> tuple:
    """("A", {a: {(ℓ<,ℓ=,ℓ>): [counts for k = 0..n]}}) over the values of A's bag on D."""
    P, d = _packed_table(A, D, merge_sides=False, headroom=False)
    return "A", {a: {t: P.unpack(p) for t, p in row.items()} for a, row in d.items()}


def f_q(q: Fraction, lt: int, eq: int, gt: int) -> Fraction:
    """Weight of a value with rank statistics (ℓ<, ℓ=, ℓ>) in the q-quantile."""
    n = lt + eq + gt
    if n == 0 or eq == 0:
        return Fraction(0)
    i1 = math.ceil(q * n)
    i2 = math.floor(q * n + 1)
    hits = (lt < i1 <= lt + eq) + (lt < i2 <= lt + eq)
    return Fraction(hits, 2)


def _avg_weight(lt, eq, gt):
    return Fraction(eq, lt + eq + gt) if eq else 0


def _weighted(table, weight, n: int | None = None) -> list:
    kind, d = table
    if kind != "A":
        raise VariantMismatch("sum_k needs a table over values")
    out: list | None = None
    for a, row in d.items():
        for (lt, eq, gt), counts in row.items():
            if out is None:
                out = [Fraction(0)] * len(counts)
            w = weight(lt, eq, gt)
            if w:
                w *= a
                for k, c in enumerate(counts):
                    if c:
                        out[k] += w * c
    out = out or []
    if n is not None:
        out += [Fraction(0)] * (n + 1 - len(out))
    return out


def sumk_avg(table, n: int | None = None) -> list:
    """Pass n to pad the result when the table has no values."""
    return _weighted(table, _avg_weight, n)


def sumk_qnt(table, q, n: int | None = None) -> list:
    q = Fraction(q)
    return _weighted(table, lambda lt, eq, gt: f_q(q, lt, eq, gt), n)


def _weighted_packed(P: Packer, d: dict, weight) -> list:
    """Same as `_weighted` but sums packed rows sharing a denominator before unpacking."""
    if not d:
        return []
    L = math.lcm(*(a.denominator for a in d))
    pos: dict = {}
    neg: dict = {}
    for a, row in d.items():
        aL = int(a * L)
        for triple, p in row.items():
            w = weight(*triple)
            if not w or not aL:
                continue
            w = Fraction(w)
            mult = w.numerator * aL
            acc = pos if mult > 0 else neg
            acc[w.denominator] = acc.get(w.denominator, 0) + abs(mult) * p
    out = [Fraction(0)] * (P.n + 1)
    for sign, acc in ((1, pos), (-1, neg)):
        for den, p in acc.items():
            for k, c in enumerate(P.unpack(p)):
                if c:
                    out[k] += Fraction(sign * c, den * L)
    return out


def _sumk(A: AggregateQuery, D: Database) -> list:
    n = len(D.endo)
    if A.alpha.kind == "avg":
        P, d = _packed_table(A, D, merge_sides=True, headroom=True)
        vec = _weighted_packed(P, d, _avg_weight)
    elif A.alpha.kind == "qnt":
        q = A.alpha.q
        P, d = _packed_table(A, D, merge_sides=False, headroom=True)
        vec = _weighted_packed(P, d, lambda lt, eq, gt: f_q(q, lt, eq, gt))
    else:
        raise PreconditionViolated("avgqnt handles Avg, Median and quantiles")
    return vec + [Fraction(0)] * (n + 1 - len(vec))


def avgqnt_shapley(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    _check(A)
    return shapley_via_sumk(lambda X: _sumk(A, X), D, f)


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, n + 1)), Fraction(0))


def avg_single_relation_closed(D: Database, tau, t: Fact) -> Fraction:
    """H(n)/n·τ(t) − (H(n)−1)/(n(n−1))·Σ_{t'≠t} τ(t')."""
    facts = _single_relation(D, t)
    n = len(facts)
    v = tau(t.args)
    if n == 1:
        return v
    H = harmonic(n)
    rest = sum((tau(g.args) for g in facts if g != t), Fraction(0))
    return H / n * v - (H - 1) / (n * (n - 1)) * rest
