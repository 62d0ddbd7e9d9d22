"""Max and Min over all-hierarchical CQs."""
from __future__ import annotations

from fractions import Fraction
from math import comb

from ..aggregates import AggregateQuery
from ..counting import Packer
from ..dp import Plugin, combine, generic_dp
from ..errors import PreconditionViolated
from ..game import shapley_coefficient, shapley_via_sumk
from ..model import Database, Fact
from .boolean import _single_relation

BOT = None  # "no answers"; ordered below every value


def _order(a) -> tuple:
    return (0, 0) if a is BOT else (1, a)


class MaxPlugin(Plugin):
    """Tables are ("A", {value or BOT: poly}) when the sub-query holds the atom τ
    is localized on, and ("B", {0/1: poly}) (empty / nonempty) otherwise."""

    def map_polys(self, t, fn):
        kind, d = t
        return kind, {k: fn(p) for k, p in d.items()}

    def empty(self, tau):
        return ("B", {0: 1}) if tau is None else ("A", {BOT: 1})

    def leaf(self, tau, sat, unsat):
        if tau is None:
            return "B", {k: p for k, p in ((0, unsat), (1, sat)) if p}
        return "A", {k: p for k, p in ((BOT, unsat), (tau.of(None), sat)) if p}

    def union(self, t1, t2, free):
        (k1, d1), (k2, d2) = t1, t2
        if k1 != k2:
            raise AssertionError("root split mixed tables with and without the value atom")
        if k1 == "B":
            return "B", combine(d1, d2, lambda a, b: a | b)
        out: dict = {}
        keys = sorted(set(d1) | set(d2), key=_order)
        cum1 = cum2 = 0  # subsets whose maximum is strictly below the current key
        for a in keys:
            p1, p2 = d1.get(a, 0), d2.get(a, 0)
            v = p1 * (cum2 + p2) + cum1 * p2
            if v:
                out[a] = v
            cum1 += p1
            cum2 += p2
        return "A", out

    def cross(self, t1, t2):
        (k1, d1), (k2, d2) = t1, t2
        if k1 == "A" and k2 == "A":
            raise AssertionError("value atom on both sides of a product")
        if k1 == "B" and k2 == "B":
            return "B", combine(d1, d2, lambda a, b: a & b)
        if k1 == "B":
            (k1, d1), (k2, d2) = t2, t1
        return "A", combine(d1, d2, lambda a, flag: a if flag else BOT)


def max_table(A: AggregateQuery, D: Database) -> dict:
    """{value or BOT: [count of k-subsets with that maximum for k = 0..n]}."""
    P = Packer(len(D.endo))
    kind, d = generic_dp(A.query, D, MaxPlugin(P), tau=A.tau)
    return {a: P.unpack(p) for a, p in d.items()}


def sumk_max(A: AggregateQuery, D: Database) -> list:
    n = len(D.endo)
    out = [Fraction(0)] * (n + 1)
    for a, row in max_table(A, D).items():
        if a is BOT:
            continue
        for k, c in enumerate(row):
            out[k] += a * c
    return out


def max_shapley(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    return shapley_via_sumk(lambda X: sumk_max(A, X), D, f)


def min_shapley(A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    return -max_shapley(A.with_tau(A.tau.negated()), D, f)


def max_single_relation_closed(D: Database, tau, t: Fact) -> Fraction:
    facts = _single_relation(D, t)
    n = len(facts)
    vals = [tau(g.args) for g in facts]
    v = tau(t.args)
    total = v / n
    for a in sorted({x for x in vals if x < v}):
        le = sum(1 for x in vals if x <= a)
        lt = sum(1 for x in vals if x < a)
        weight = sum((shapley_coefficient(k, n) * (comb(le, k) - comb(lt, k))
                      for k in range(1, n)), Fraction(0))
        total += (v - a) * weight
    return total


def min_single_relation_closed(D: Database, tau, t: Fact) -> Fraction:
    if tau is None:
        raise PreconditionViolated("value function required")
    return -max_single_relation_closed(D, tau.negated(), t)
