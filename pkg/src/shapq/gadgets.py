"""Reductions from counting problems to Shapley values, run end to end.

Each builder produces the database family of a reduction; each recovery
function feeds Shapley values (by default from the exhaustive oracle) into an
exact linear system and reads off the counts."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .aggregates import (
    AVG,
    DUP,
    AggregateQuery,
    GreaterThan,
    Identity,
    ReLU,
    ValueFunction,
    quantile,
)
from .cq import ConjunctiveQuery, Var, classify, is_all_hierarchical, parse_cq, q_witness
from .errors import NonInjectiveOnDomain, OutOfRange, PreconditionViolated
from .game import shapley_bruteforce, shapley_coefficient
from .linalg import exact_solve, hilbert, kron, order_weight_matrix
from .model import Constant, Database, Fact

Q_XYY = parse_cq("Q(x) :- R(x,y), S(y).")
Q_XYY_FULL = parse_cq("Q(x,y) :- R(x,y), S(y).")


def _R(a, b) -> Fact:
    return Fact("R", (a, b))


def _S(b) -> Fact:
    return Fact("S", (b,))


# ---------------------------------------------------------------------------
# set cover


@dataclass(frozen=True)
class SetCoverInstance:
    n: int
    subsets: tuple

    def __post_init__(self):
        subs = tuple(frozenset(s) for s in self.subsets)
        object.__setattr__(self, "subsets", subs)
        if not subs:
            raise OutOfRange("need at least one subset")
        for s in subs:
            if not s or not s <= set(range(1, self.n + 1)):
                raise OutOfRange(f"subset {sorted(s)} is empty or outside 1..{self.n}")

    @property
    def m(self) -> int:
        return len(self.subsets)

    def covered(self, chosen) -> set:
        return set().union(*(self.subsets[j] for j in chosen)) if chosen else set()


SAMPLE_COVER = SetCoverInstance(4, ({1, 2}, {3, 4}, {2, 3}))


def cover_counts_by_enumeration(inst: SetCoverInstance) -> list:
    """Z[i][j]: number of j-subsets of the collection covering exactly i elements."""
    Z = [[0] * (inst.m + 1) for _ in range(inst.n + 1)]
    for j in range(inst.m + 1):
        for chosen in itertools.combinations(range(inst.m), j):
            Z[len(inst.covered(chosen))][j] += 1
    return Z


def count_set_covers(inst: SetCoverInstance) -> int:
    return sum(cover_counts_by_enumeration(inst)[inst.n])


def avg_setcover_query() -> AggregateQuery:
    return AggregateQuery(AVG, ReLU(1), Q_XYY)


def build_avg_setcover_db(inst: SetCoverInstance, q: int, r: int) -> tuple:
    """(D_{q,r}, S(0))."""
    n, m = inst.n, inst.m
    if not (0 <= q <= n and 0 <= r <= m):
        raise OutOfRange(f"need 0 <= q <= {n} and 0 <= r <= {m}")
    exo = [_R(-i, j + 1) for j, Y in enumerate(inst.subsets) for i in sorted(Y)]
    exo += [_R(-n - i, m + 1) for i in range(1, q + 2)]
    exo += [_R(1, m + 1 + j) for j in range(1, r + 1)]
    exo += [_R(1, 0), _S(m + 1)]
    endo = [_S(j) for j in range(1, m + 1)] + [_S(m + 1 + j) for j in range(1, r + 1)] + [_S(0)]
    return Database.build(endo, exo, {"R": 2, "S": 1}), _S(0)


def _default_shapley(A: AggregateQuery) -> Callable:
    return lambda D, f: shapley_bruteforce(A, D, f, override=True)


def avg_setcover_matrix(n: int, m: int) -> list:
    """L = M ⊗ N, rows indexed by (r, q), columns by (j, i), both row-major.

    N[q][i] = 1/(q + i + 2): after S(0) joins with i elements covered and
    q + 1 padding answers present, the bag holds i + q + 2 answers."""
    return kron(order_weight_matrix(m), hilbert(n + 1, shift=1))


def recover_cover_counts_avg(inst: SetCoverInstance, shapley_fn: Callable | None = None) -> list:
    """Recover Z[i][j] from the Shapley values of S(0) over all D_{q,r}."""
    n, m = inst.n, inst.m
    fn = shapley_fn or _default_shapley(avg_setcover_query())
    a = []
    for r in range(m + 1):
        for q in range(n + 1):
            D, f = build_avg_setcover_db(inst, q, r)
            a.append(fn(D, f))
    z = exact_solve(avg_setcover_matrix(n, m), a)
    Z = [[Fraction(0)] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        for i in range(n + 1):
            Z[i][j] = z[j * (n + 1) + i]
    return Z


def _lowest(q) -> tuple:
    q = Fraction(q)
    if not 0 < q < 1:
        raise OutOfRange("quantile must lie strictly between 0 and 1")
    return q.numerator, q.denominator


def qnt_setcover_query(q) -> AggregateQuery:
    return AggregateQuery(quantile(q), GreaterThan(Fraction(0), 1), Q_XYY)


def build_qnt_setcover_db(inst: SetCoverInstance, q) -> Database:
    a, b = _lowest(q)
    n = inst.n
    width = b * (b - a)
    exo = [_R(j * width - l, i + 1)
           for i, Y in enumerate(inst.subsets) for j in sorted(Y) for l in range(width)]
    exo += [_R(-l, 0) for l in range(1, b * a * n + 1)]
    exo += [_R(n * width + 1, 0), _S(0)]
    endo = [_S(i) for i in range(1, inst.m + 1)]
    return Database.build(endo, sorted(set(exo), key=Fact.sort_key), {"R": 2, "S": 1})


def setcover_game_value(inst: SetCoverInstance, chosen) -> int:
    return int(len(inst.covered(chosen)) == inst.n)


def setcover_game_shapley(inst: SetCoverInstance, player: int) -> Fraction:
    """Shapley value of player (1-based) in ν_sc(C) = [C covers everything]."""
    m = inst.m
    others = [p for p in range(m) if p != player - 1]
    total = Fraction(0)
    for k in range(m):
        for C in itertools.combinations(others, k):
            gain = setcover_game_value(inst, C + (player - 1,)) - setcover_game_value(inst, C)
            if gain:
                total += shapley_coefficient(k, m) * gain
    return total


# ---------------------------------------------------------------------------
# permanent via has-duplicates


def permanent(M) -> int:
    n = len(M)
    return sum(all(M[i][p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def pairs_from_matrix(M) -> list:
    """Bipartite edges of a 0/1 matrix as pairs over 1..2n (rows 1..n, columns n+1..2n)."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise OutOfRange("matrix must be square")
    return [frozenset({i + 1, n + j + 1}) for i in range(n) for j in range(n) if M[i][j]]


def dup_permanent_query(variant: str = "full") -> AggregateQuery:
    if variant == "full":
        return AggregateQuery(DUP, Identity(1), Q_XYY_FULL)
    if variant == "relu":
        return AggregateQuery(DUP, ReLU(1), Q_XYY)
    raise OutOfRange(f"unknown variant {variant!r}")


def build_dup_permanent_db(M, r: int, variant: str = "full") -> tuple:
    """(D_r, S(0)) for the pair collection of the 0/1 matrix M."""
    pairs = pairs_from_matrix(M)
    m = len(pairs)
    if not 0 <= r <= m:
        raise OutOfRange(f"need 0 <= r <= {m}")
    R = [(i, j + 1) for j, Y in enumerate(pairs) for i in sorted(Y)]
    R += [(0, 0), (-1, -1)] + [(-2, m + k) for k in range(1, r + 1)]
    if variant == "full":
        R = [(0, b) if a < 0 else (a, b) for a, b in R]
    elif variant != "relu":
        raise OutOfRange(f"unknown variant {variant!r}")
    exo = [_R(a, b) for a, b in R] + [_S(-1)]
    endo = [_S(j) for j in range(0, m + 1)] + [_S(m + k) for k in range(1, r + 1)]
    return Database.build(endo, exo, {"R": 2, "S": 1}), _S(0)


def recover_matching_counts_dup(M, variant: str = "full",
                                shapley_fn: Callable | None = None) -> list:
    """Z[j]: number of j-sets of pairwise disjoint pairs, from Shapley values of S(0)."""
    m = len(pairs_from_matrix(M))
    fn = shapley_fn or _default_shapley(dup_permanent_query(variant))
    a = []
    for r in range(m + 1):
        D, f = build_dup_permanent_db(M, r, variant)
        a.append(fn(D, f))
    return exact_solve(order_weight_matrix(m), a)


def recover_permanent_dup(M, variant: str = "full", shapley_fn: Callable | None = None) -> Fraction:
    n = len(M)
    Z = recover_matching_counts_dup(M, variant, shapley_fn)
    return Z[n] if n < len(Z) else Fraction(0)


def matching_counts(M) -> list:
    pairs = pairs_from_matrix(M)
    Z = [0] * (len(pairs) + 1)
    for j in range(len(pairs) + 1):
        for C in itertools.combinations(pairs, j):
            if len(set().union(*C)) == 2 * j:
                Z[j] += 1
    return Z


# ---------------------------------------------------------------------------
# embedding Q_xyy into other all-hierarchical queries


@dataclass(frozen=True)
class Embedding:
    query: ConjunctiveQuery
    database: Database
    h: dict  # endogenous fact of D -> endogenous fact of D0
    x0: Var
    y0: Var
    position: int  # 1-based head position of x0
    filler: Constant

    def g(self, answer: tuple) -> tuple:
        (a,) = answer
        return tuple(a if v == self.x0 else self.filler for v in self.query.head)

    def tau(self, tau: ValueFunction) -> ValueFunction:
        return tau.at(self.position) if tau.pos is not None else tau

    def aggregate_query(self, A: AggregateQuery) -> AggregateQuery:
        return AggregateQuery(A.alpha, self.tau(A.tau), self.query)


def _fresh_symbol(D: Database) -> str:
    used = D.constants()
    c, i = "c", 0
    while c in used:
        i += 1
        c = f"c{i}"
    return c


def embed_qxyy(Q0: ConjunctiveQuery, D: Database) -> Embedding:
    """Database D0 for Q0 whose game on endogenous facts is that of Q_xyy on D."""
    if Q0.has_self_join() or not is_all_hierarchical(Q0) or q_witness(Q0) is None:
        raise PreconditionViolated(f"{Q0} must be self-join-free, all-hierarchical and not "
                                   f"q-hierarchical (it is {classify(Q0).label()})")
    if not set(D.schema) <= {"R", "S"} or any(
            D.schema.get(r, k) != k for r, k in (("R", 2), ("S", 1))):
        raise PreconditionViolated("D must be a database over R/2 and S/1")
    x0, y0 = q_witness(Q0)
    body = Q0.body
    phi_r = next(a for a in body if x0 in a.args)
    phi_s = next(a for a in body if y0 in a.args and x0 not in a.args)
    c = _fresh_symbol(D)

    def inst(atom, binding):
        return Fact(atom.relation, tuple(
            (binding.get(t, c) if isinstance(t, Var) else t) for t in atom.args))

    Rs = [f for f in D.facts if f.relation == "R"]
    Ss = [f for f in D.facts if f.relation == "S"]
    bs = sorted({f.args[1] for f in Rs} | {f.args[0] for f in Ss}, key=repr)
    endo, exo, h = [], [], {}
    for atom in body:
        if atom is phi_r:
            for f in Rs:
                g = inst(atom, {x0: f.args[0], y0: f.args[1]})
                (endo if f in D.endo else exo).append(g)
                if f in D.endo:
                    h[f] = g
        elif atom is phi_s:
            for f in Ss:
                g = inst(atom, {y0: f.args[0]})
                (endo if f in D.endo else exo).append(g)
                if f in D.endo:
                    h[f] = g
        elif x0 in atom.args:
            exo += [inst(atom, {x0: f.args[0], y0: f.args[1]}) for f in Rs]
        elif y0 in atom.args:
            exo += [inst(atom, {y0: b}) for b in bs]
        else:
            exo.append(inst(atom, {}))
    schema = {a.relation: len(a.args) for a in body}
    D0 = Database(schema, frozenset(endo), frozenset(exo))
    return Embedding(Q0, D0, h, x0, y0, Q0.head.index(x0) + 1, c)


# ---------------------------------------------------------------------------
# monotone transforms


def _positions(Q: ConjunctiveQuery, i: int) -> dict:
    if not 1 <= i <= len(Q.head):
        raise OutOfRange(f"head position {i} out of range")
    x = Q.head[i - 1]
    return {a.relation: [p for p, t in enumerate(a.args) if t == x] for a in Q.body if x in a.args}


def push_fact(f: Fact, Q: ConjunctiveQuery, i: int, gamma: dict) -> Fact:
    pos = _positions(Q, i).get(f.relation)
    if not pos:
        return f
    args = list(f.args)
    for p in pos:
        if args[p] not in gamma:
            raise PreconditionViolated(f"γ is not defined on {args[p]!r}")
        args[p] = gamma[args[p]]
    return Fact(f.relation, tuple(args))


def monotone_push(D: Database, Q: ConjunctiveQuery, i: int, gamma: dict) -> Database:
    """π(D): apply γ at every argument position where head variable x_i occurs."""
    pos = _positions(Q, i)
    domain = {f.args[p] for f in D.facts for p in pos.get(f.relation, ())}
    image: dict = {}
    for v in domain:
        if v not in gamma:
            raise PreconditionViolated(f"γ is not defined on {v!r}")
        w = gamma[v]
        if image.setdefault(w, v) != v:
            raise NonInjectiveOnDomain(f"γ maps {image[w]!r} and {v!r} to {w!r}")
    return Database(D.schema,
                    frozenset(push_fact(f, Q, i, gamma) for f in D.endo),
                    frozenset(push_fact(f, Q, i, gamma) for f in D.exo))


def shifted_table(gamma: ValueFunction, values) -> dict:
    """γ' = γ + id on the given integers, as an explicit table (strictly increasing
    whenever γ is non-decreasing)."""
    out = {}
    for v in values:
        w = gamma.of(v) + v
        if w.denominator != 1:
            raise PreconditionViolated("γ + id must produce integers")
        out[v] = int(w)
    return out
