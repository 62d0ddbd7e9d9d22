"""Value functions, aggregate functions, CQ evaluation and aggregate-query evaluation."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .cq import ConjunctiveQuery, match_atom
from .errors import (
    NonNumericConstant,
    OutOfRange,
    QuerySyntaxError,
    SchemaMismatch,
)
from .model import Constant, Database, Fact

# ---------------------------------------------------------------------------
# value functions


def _numeric(c: Constant) -> Fraction:
    if isinstance(c, bool) or not isinstance(c, int):
        raise NonNumericConstant(f"value function applied to symbol {c!r}")
    return Fraction(c)


class ValueFunction:
    """Maps an answer tuple to a rational by looking at a single head position."""

    pos: int | None = None  # 1-based head position, None for constant functions

    def of(self, c: Constant) -> Fraction:
        raise NotImplementedError

    def __call__(self, t: tuple) -> Fraction:
        if self.pos is None:
            return self.of(None)
        if self.pos > len(t):
            raise OutOfRange(f"position {self.pos} on a tuple of length {len(t)}")
        return self.of(t[self.pos - 1])

    def at(self, pos: int) -> "ValueFunction":
        """Same function reading a different head position."""
        raise NotImplementedError

    def negated(self) -> "ValueFunction":
        return Negated(self)


@dataclass(frozen=True)
class Identity(ValueFunction):
    pos: int

    def of(self, c):
        return _numeric(c)

    def at(self, pos):
        return Identity(pos)

    def __str__(self):
        return f"id:{self.pos}"


@dataclass(frozen=True)
class GreaterThan(ValueFunction):
    b: Fraction
    pos: int

    def of(self, c):
        return Fraction(1) if _numeric(c) > self.b else Fraction(0)

    def at(self, pos):
        return GreaterThan(self.b, pos)

    def __str__(self):
        return f"gt:{self.b}:{self.pos}"


@dataclass(frozen=True)
class ReLU(ValueFunction):
    pos: int

    def of(self, c):
        return max(_numeric(c), Fraction(0))

    def at(self, pos):
        return ReLU(pos)

    def __str__(self):
        return f"relu:{self.pos}"


@dataclass(frozen=True)
class ConstantVF(ValueFunction):
    c: Fraction

    @property
    def pos(self):
        return None

    def of(self, _c=None):
        return Fraction(self.c)

    def at(self, pos):
        return self

    def negated(self):
        return ConstantVF(-Fraction(self.c))

    def __str__(self):
        return f"const:{self.c}"


@dataclass(frozen=True)
class Negated(ValueFunction):
    inner: ValueFunction

    @property
    def pos(self):
        return self.inner.pos

    def of(self, c):
        return -self.inner.of(c)

    def at(self, pos):
        return Negated(self.inner.at(pos))

    def negated(self):
        return self.inner


@dataclass(frozen=True)
class Lookup(ValueFunction):
    """Value read through an explicit finite table; used for monotone transforms."""

    table: tuple  # sorted (constant, Fraction) pairs
    pos: int

    def of(self, c):
        return dict(self.table)[c]

    def at(self, pos):
        return Lookup(self.table, pos)


def parse_tau(text: str) -> ValueFunction:
    parts = text.strip().split(":")
    try:
        kind = parts[0]
        if kind == "id" and len(parts) == 2:
            return Identity(int(parts[1]))
        if kind == "relu" and len(parts) == 2:
            return ReLU(int(parts[1]))
        if kind == "gt" and len(parts) == 3:
            return GreaterThan(Fraction(parts[1]), int(parts[2]))
        if kind == "const" and len(parts) == 2:
            return ConstantVF(Fraction(parts[1]))
    except (ValueError, ZeroDivisionError):
        pass
    raise QuerySyntaxError(f"bad value function {text!r}", 0)


def tau_on_substituted(tau: ValueFunction, qsub: ConjunctiveQuery) -> ValueFunction:
    """The value function on a query produced by `substitute`."""
    rec = qsub.record
    if rec is None or tau.pos is None:
        return tau
    p0 = tau.pos - 1
    if p0 in rec.positions:
        return ConstantVF(tau.of(rec.value))
    shift = sum(1 for p in rec.positions if p < p0)
    return tau.at(tau.pos - shift) if shift else tau


# ---------------------------------------------------------------------------
# aggregate functions

_KINDS = ("sum", "count", "cdist", "min", "max", "avg", "qnt", "dup")


@dataclass(frozen=True)
class AggregateFunction:
    kind: str
    q: Fraction | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown aggregate {self.kind}")
        if self.kind == "qnt":
            q = Fraction(self.q)
            if not 0 < q < 1:
                raise OutOfRange("quantile parameter must lie strictly between 0 and 1")
            object.__setattr__(self, "q", q)

    def __str__(self) -> str:
        if self.kind == "qnt":
            return "median" if self.q == Fraction(1, 2) else f"qnt:{self.q.numerator}/{self.q.denominator}"
        return self.kind


SUM = AggregateFunction("sum")
COUNT = AggregateFunction("count")
CDIST = AggregateFunction("cdist")
MIN = AggregateFunction("min")
MAX = AggregateFunction("max")
AVG = AggregateFunction("avg")
MEDIAN = AggregateFunction("qnt", Fraction(1, 2))
DUP = AggregateFunction("dup")


def quantile(q) -> AggregateFunction:
    return AggregateFunction("qnt", Fraction(q))


def parse_agg(text: str) -> AggregateFunction:
    t = text.strip().lower()
    simple = {"sum": SUM, "count": COUNT, "cdist": CDIST, "min": MIN, "max": MAX,
              "avg": AVG, "median": MEDIAN, "dup": DUP}
    if t in simple:
        return simple[t]
    if t.startswith("qnt:"):
        try:
            return quantile(Fraction(t[4:]))
        except (ValueError, ZeroDivisionError):
            pass
    raise QuerySyntaxError(f"bad aggregate {text!r}", 0)


class RationalBag(Counter):
    """Multiset of rationals (value -> multiplicity)."""

    def size(self) -> int:
        return sum(self.values())

    def sorted_elements(self) -> list:
        return [v for v in sorted(self) for _ in range(self[v])]


def quantile_of_sorted(xs: list, q: Fraction) -> Fraction:
    """½(x_⌈q·n⌉ + x_⌊q·n+1⌋) with 1-based indices into the ascending list."""
    n = len(xs)
    if n == 0:
        return Fraction(0)
    i1 = math.ceil(q * n)
    i2 = math.floor(q * n + 1)
    return Fraction(xs[i1 - 1] + xs[i2 - 1], 2)


def aggregate(alpha: AggregateFunction, B: RationalBag | Counter) -> Fraction:
    B = RationalBag({k: v for k, v in B.items() if v > 0})
    if not B:
        return Fraction(0)
    k = alpha.kind
    if k == "sum":
        return sum((Fraction(v) * m for v, m in B.items()), Fraction(0))
    if k == "count":
        return Fraction(B.size())
    if k == "cdist":
        return Fraction(len(B))
    if k == "min":
        return Fraction(min(B))
    if k == "max":
        return Fraction(max(B))
    if k == "avg":
        return sum((Fraction(v) * m for v, m in B.items()), Fraction(0)) / B.size()
    if k == "qnt":
        return quantile_of_sorted(B.sorted_elements(), alpha.q)
    return Fraction(1) if any(m >= 2 for m in B.values()) else Fraction(0)


def alpha_of_singleton(alpha: AggregateFunction, c: Fraction) -> Fraction:
    return aggregate(alpha, RationalBag({c: 1}))


@dataclass(frozen=True)
class AggregateQuery:
    alpha: AggregateFunction
    tau: ValueFunction
    query: ConjunctiveQuery

    def __post_init__(self):
        if self.tau.pos is not None and not 1 <= self.tau.pos <= len(self.query.head):
            raise OutOfRange(
                f"value function reads position {self.tau.pos} of a head of arity "
                f"{len(self.query.head)}")

    def with_tau(self, tau: ValueFunction) -> "AggregateQuery":
        return AggregateQuery(self.alpha, tau, self.query)

    def with_alpha(self, alpha: AggregateFunction) -> "AggregateQuery":
        return AggregateQuery(alpha, self.tau, self.query)

    def __str__(self) -> str:
        return f"{self.alpha}∘{self.tau}∘{self.query}"


# ---------------------------------------------------------------------------
# evaluation


def _index(q: ConjunctiveQuery, facts) -> dict:
    by_rel: dict = {a.relation: [] for a in q.body}
    for f in facts:
        if f.relation in by_rel:
            by_rel[f.relation].append(f)
    return by_rel


def homomorphisms(q: ConjunctiveQuery, facts) -> Iterator[tuple]:
    """Yield (binding, facts used per atom) for every homomorphism into `facts`."""
    by_rel = _index(q, facts)
    order = []
    bound: set = set()
    remaining = list(range(len(q.body)))
    while remaining:
        # prefer atoms sharing variables with what is already bound, then small ones
        best = max(remaining, key=lambda i: (len(q.body[i].vars() & bound),
                                             -len(by_rel[q.body[i].relation])))
        remaining.remove(best)
        order.append(best)
        bound |= q.body[best].vars()
    used = [None] * len(q.body)

    def rec(depth, binding):
        if depth == len(order):
            yield binding, tuple(used)
            return
        i = order[depth]
        for f in by_rel[q.body[i].relation]:
            b = match_atom(q.body[i], f, binding)
            if b is not None:
                used[i] = f
                yield from rec(depth + 1, b)

    yield from rec(0, {})


def check_schema(q: ConjunctiveQuery, D: Database) -> None:
    for a in q.body:
        if a.relation not in D.schema:
            raise SchemaMismatch(f"relation {a.relation} is not in the database schema")
        if D.schema[a.relation] != len(a.args):
            raise SchemaMismatch(
                f"{a.relation} has arity {D.schema[a.relation]}, atom uses {len(a.args)}")


def head_tuple(q: ConjunctiveQuery, binding: dict) -> tuple:
    return tuple(binding[v] for v in q.head)


def answers_of_facts(q: ConjunctiveQuery, facts) -> set:
    return {head_tuple(q, b) for b, _ in homomorphisms(q, facts)}


def answers(q: ConjunctiveQuery, D: Database) -> set:
    check_schema(q, D)
    return answers_of_facts(q, D.facts)


def value_bag_of_answers(tau: ValueFunction, ans) -> RationalBag:
    return RationalBag(tau(t) for t in ans)


def value_bag(A: AggregateQuery, D: Database) -> RationalBag:
    return value_bag_of_answers(A.tau, answers(A.query, D))


def evaluate(A: AggregateQuery, D: Database) -> Fraction:
    """A(D) = α of the bag of τ-values over the answer set."""
    return aggregate(A.alpha, value_bag(A, D))


def evaluate_facts(A: AggregateQuery, facts) -> Fraction:
    return aggregate(A.alpha, value_bag_of_answers(A.tau, answers_of_facts(A.query, facts)))


def exogenous_part(D: Database) -> Database:
    return Database(D.schema, frozenset(), D.exo)


def tau_atom_index(q: ConjunctiveQuery, tau: ValueFunction) -> int:
    """Index of the atom on which τ is localized: the first atom holding the
    variable τ reads, or atom 0 for constant functions."""
    if tau.pos is None:
        return 0
    x = q.head[tau.pos - 1]
    return min(q.atoms_of(x))


def tau_value_of_fact(q: ConjunctiveQuery, tau: ValueFunction, f: Fact):
    """τ-value a fact of the localizing atom induces, or None if it cannot match."""
    atom = q.body[tau_atom_index(q, tau)]
    b = match_atom(atom, f)
    if b is None:
        return None
    if tau.pos is None:
        return tau.of(None)
    return tau.of(b[q.head[tau.pos - 1]])

