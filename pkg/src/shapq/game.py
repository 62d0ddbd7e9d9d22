"""Shapley and Banzhaf values: coefficients, the sum_k identities and an
exhaustive oracle that enumerates every coalition of endogenous facts."""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd

import numpy as np

from .aggregates import (
    AggregateQuery,
    check_schema,
    evaluate,
    exogenous_part,
    head_tuple,
    homomorphisms,
)
from .errors import FactNotEndogenous, InstanceTooLarge, LengthMismatch, OutOfRange
from .model import Database, Fact, make_fact_exogenous, remove_fact

DEFAULT_CAP = 20
_CHUNK = 1 << 15


def brute_force_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("SHAPQ_CAP")
    return int(env) if env else DEFAULT_CAP


def shapley_coefficient(k: int, n: int) -> Fraction:
    """q_k = k!(n-k-1)!/n!, the weight of a coalition of size k."""
    if n < 1 or not 0 <= k <= n - 1:
        raise OutOfRange(f"need 0 <= k <= n-1, got k={k}, n={n}")
    return Fraction(factorial(k) * factorial(n - k - 1), factorial(n))


def shapley_from_sumk(sumk_F, sumk_G, n: int) -> Fraction:
    if len(sumk_F) < n or len(sumk_G) < n:
        raise LengthMismatch(f"sum_k vectors need {n} entries")
    return sum((shapley_coefficient(k, n) * (Fraction(sumk_F[k]) - Fraction(sumk_G[k]))
                for k in range(n)), Fraction(0))


def banzhaf_from_sumk(sumk_F, sumk_G, n: int) -> Fraction:
    if len(sumk_F) < n or len(sumk_G) < n:
        raise LengthMismatch(f"sum_k vectors need {n} entries")
    total = sum((Fraction(sumk_F[k]) - Fraction(sumk_G[k]) for k in range(n)), Fraction(0))
    return total / 2 ** (n - 1)


def split_on_fact(D: Database, f: Fact) -> tuple:
    """(F, G): f made exogenous, and f removed."""
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    return make_fact_exogenous(D, f), remove_fact(D, f)


def shapley_via_sumk(sumk_fn, D: Database, f: Fact) -> Fraction:
    F, G = split_on_fact(D, f)
    return shapley_from_sumk(sumk_fn(F), sumk_fn(G), len(D.endo))


def utility(A: AggregateQuery, D: Database, coalition) -> Fraction:
    """ν(C) = A(C ∪ Dˣ) − A(Dˣ)."""
    base = exogenous_part(D)
    return evaluate(A, base.with_facts(exo=coalition)) - evaluate(A, base)


# ---------------------------------------------------------------------------
# exhaustive oracle


def _lcm(xs) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


@dataclass
class _Answer:
    values_index: int
    reqs: list


class BruteForceGame:
    """All coalitions of D's endogenous facts, evaluated in numpy batches.

    Each coalition is a bitmask over `players`; for each one the aggregate
    value is produced as an exact integer numerator over a per-coalition
    denominator taken from a small set."""

    def __init__(self, A: AggregateQuery, D: Database, cap: int | None = None,
                 override: bool = False):
        self.A, self.D = A, D
        self.players = D.sorted_endo()
        self.n = n = len(self.players)
        limit = brute_force_cap(cap)
        if n > limit and not override:
            raise InstanceTooLarge(
                f"{n} endogenous facts exceed the exhaustive-enumeration cap of {limit}")
        bit = {f: 1 << i for i, f in enumerate(self.players)}
        reqs: dict = {}
        q = A.query
        check_schema(q, D)
        for binding, used in homomorphisms(q, D.facts):
            t = head_tuple(q, binding)
            req = 0
            for f in used:
                req |= bit.get(f, 0)
            reqs.setdefault(t, set()).add(req)
        answers = sorted(reqs, key=lambda t: (A.tau(t), repr(t)))
        self.values = [A.tau(t) for t in answers]
        self.reqs = [self._minimal(reqs[t]) for t in answers]
        L = _lcm(v.denominator for v in self.values) if self.values else 1
        self.L = L
        scaled = [int(v * L) for v in self.values]
        big = max((abs(s) for s in scaled), default=0) * max(len(scaled), 1) * 2
        self.dtype = np.int64 if big < 2 ** 40 else object
        self.scaled = np.array(scaled, dtype=self.dtype)
        distinct = sorted(set(self.values))
        self.group = np.array([distinct.index(v) for v in self.values], dtype=np.int64)
        self.n_groups = len(distinct)
        self._acc = None

    @staticmethod
    def _minimal(rs) -> list:
        rs = sorted(set(rs), key=lambda r: bin(r).count("1"))
        keep: list = []
        for r in rs:
            if not any(k & r == k for k in keep):
                keep.append(r)
        return keep

    # -- per-chunk evaluation -------------------------------------------------
    def _present(self, masks: np.ndarray) -> np.ndarray:
        P = np.zeros((len(masks), len(self.reqs)), dtype=bool)
        for j, rs in enumerate(self.reqs):
            col = P[:, j]
            for r in rs:
                col |= (masks & r) == r
        return P

    def _grouped(self, P: np.ndarray) -> np.ndarray:
        G = np.zeros((P.shape[0], self.n_groups), dtype=np.int64)
        for j in range(P.shape[1]):
            G[:, self.group[j]] += P[:, j]
        return G

    def evaluate_masks(self, masks: np.ndarray) -> tuple:
        """(numerators, denominators) of A on each coalition."""
        alpha = self.A.alpha
        kind = alpha.kind
        m = len(masks)
        P = self._present(masks)
        one = np.ones(m, dtype=np.int64)
        if P.shape[1] == 0:
            return np.zeros(m, dtype=self.dtype), one
        L = self.L
        if kind == "count":
            return P.sum(axis=1).astype(np.int64), one
        if kind in ("sum", "avg"):
            num = P.astype(self.dtype) @ self.scaled
            if kind == "sum":
                return num, one * L
            cnt = P.sum(axis=1).astype(np.int64)
            return num, np.where(cnt > 0, cnt, 1) * L
        G = self._grouped(P)
        if kind == "cdist":
            return (G > 0).sum(axis=1).astype(np.int64), one
        if kind == "dup":
            return (G >= 2).any(axis=1).astype(np.int64), one
        any_ = P.any(axis=1)
        if kind in ("max", "min"):
            # answers are sorted by value, so the first/last present answer is the extreme
            if kind == "max":
                idx = P.shape[1] - 1 - np.argmax(P[:, ::-1], axis=1)
            else:
                idx = np.argmax(P, axis=1)
            num = np.where(any_, self.scaled[idx], 0)
            return num, one * L
        # quantile: position of the i-th smallest present answer
        a, b = alpha.q.numerator, alpha.q.denominator
        cum = np.cumsum(P, axis=1, dtype=np.int64)
        cnt = cum[:, -1]
        i1 = (a * cnt + b - 1) // b
        i2 = (a * cnt) // b + 1
        i1 = np.maximum(i1, 1)
        i2 = np.minimum(i2, np.maximum(cnt, 1))
        idx1 = np.argmax(cum >= i1[:, None], axis=1)
        idx2 = np.argmax(cum >= i2[:, None], axis=1)
        num = np.where(any_, self.scaled[idx1] + self.scaled[idx2], 0)
        return num, one * (2 * L)

    # -- accumulation ---------------------------------------------------------
    def _accumulate(self, facts_idx: list) -> dict:
        """Sums of numerators keyed by (denominator, popcount, member-of-fact-j)."""
        n = self.n
        total = 1 << n
        popcount_tab = np.array([bin(i).count("1") for i in range(1 << min(n, 16))],
                                dtype=np.int64)
        sums: dict = {}
        for start in range(0, total, _CHUNK):
            masks = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
            num, den = self.evaluate_masks(masks)
            pc = popcount_tab[masks & 0xFFFF]
            if n > 16:
                pc = pc + popcount_tab[masks >> 16]
            dens, den_idx = np.unique(den, return_inverse=True)
            for di, d in enumerate(dens):
                sel = den_idx == di
                nd, pd, md = num[sel], pc[sel], masks[sel]
                for j in [None] + facts_idx:
                    if j is None:
                        mem = np.zeros(len(md), dtype=np.int64)
                    else:
                        mem = (md >> j) & 1
                    key = pd * 2 + mem
                    acc = np.zeros(2 * (n + 1), dtype=nd.dtype)
                    np.add.at(acc, key, nd)
                    slot = sums.setdefault((j, int(d)), [0] * (2 * (n + 1)))
                    for i, v in enumerate(acc.tolist()):
                        slot[i] += int(v)
        return sums

    def sumk(self) -> list:
        sums = self._accumulate([])
        out = [Fraction(0)] * (self.n + 1)
        for (j, d), slot in sums.items():
            for k in range(self.n + 1):
                out[k] += Fraction(slot[2 * k], d)
        return out

    def values_for(self, facts=None, kind: str = "shapley") -> dict:
        facts = self.players if facts is None else list(facts)
        idx = []
        for f in facts:
            if f not in self.D.endo:
                raise FactNotEndogenous(str(f))
            idx.append(self.players.index(f))
        sums = self._accumulate(idx)
        n = self.n
        out = {}
        for f, j in zip(facts, idx):
            val = Fraction(0)
            for (jj, d), slot in sums.items():
                if jj != j:
                    continue
                for k in range(n + 1):
                    without, with_ = slot[2 * k], slot[2 * k + 1]
                    if kind == "shapley":
                        if with_ and k >= 1:
                            val += shapley_coefficient(k - 1, n) * Fraction(with_, d)
                        if without and k <= n - 1:
                            val -= shapley_coefficient(k, n) * Fraction(without, d)
                    else:
                        val += Fraction(with_ - without, d)
            out[f] = val if kind == "shapley" else val / 2 ** (n - 1)
        return out


def shapley_bruteforce(A: AggregateQuery, D: Database, f: Fact, cap: int | None = None,
                       override: bool = False) -> Fraction:
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    return BruteForceGame(A, D, cap, override).values_for([f])[f]


def shapley_bruteforce_all(A: AggregateQuery, D: Database, cap: int | None = None,
                           override: bool = False) -> dict:
    return BruteForceGame(A, D, cap, override).values_for()


def banzhaf_bruteforce(A: AggregateQuery, D: Database, f: Fact, cap: int | None = None,
                       override: bool = False) -> Fraction:
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    return BruteForceGame(A, D, cap, override).values_for([f], kind="banzhaf")[f]


def sumk_bruteforce(A: AggregateQuery, D: Database, cap: int | None = None,
                    override: bool = False) -> list:
    return BruteForceGame(A, D, cap, override).sumk()
