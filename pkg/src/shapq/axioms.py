"""Check a table of values against efficiency, null player and symmetry."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .aggregates import AggregateQuery, answers, evaluate, exogenous_part, homomorphisms
from .cq import is_var
from .model import Database, Fact


@dataclass
class AxiomReport:
    efficiency_lhs: Fraction
    efficiency_rhs: Fraction
    null_players: list = field(default_factory=list)
    null_failures: list = field(default_factory=list)
    symmetric_pairs: list = field(default_factory=list)
    symmetry_failures: list = field(default_factory=list)
    missing: list = field(default_factory=list)

    @property
    def efficiency(self) -> bool:
        return self.efficiency_lhs == self.efficiency_rhs

    @property
    def null_player(self) -> bool:
        return not self.null_failures

    @property
    def symmetry(self) -> bool:
        return not self.symmetry_failures

    @property
    def ok(self) -> bool:
        return self.efficiency and self.null_player and self.symmetry and not self.missing

    def lines(self) -> list:
        def verdict(b):
            return "PASS" if b else "FAIL"

        out = [f"efficiency: {verdict(self.efficiency)} "
               f"(sum {self.efficiency_lhs} vs A(D)-A(Dx) {self.efficiency_rhs})",
               f"null-player: {verdict(self.null_player)} ({len(self.null_players)} facts checked)",
               f"symmetry: {verdict(self.symmetry)} ({len(self.symmetric_pairs)} pairs checked)"]
        out += [f"  null player {f} has value {v}" for f, v in self.null_failures]
        out += [f"  {f} = {a} but {g} = {b}" for f, g, a, b in self.symmetry_failures]
        out += [f"  no value for {f}" for f in self.missing]
        return out


def _transposition(f1: Fact, f2: Fact):
    """The pair {u, v} whose swap turns f1 into f2, or None."""
    if f1.relation != f2.relation or f1 == f2:
        return None
    pair = None
    for a, b in zip(f1.args, f2.args):
        if a == b:
            continue
        if pair is None:
            pair = {a, b}
        elif {a, b} != pair:
            return None
    return tuple(pair)


def _swap(f: Fact, u, v) -> Fact:
    return Fact(f.relation, tuple(v if a == u else u if a == v else a for a in f.args))


def interchangeable_pairs(A: AggregateQuery, D: Database) -> list:
    """Endogenous pairs (f1, f2) exchanged by a transposition of constants that maps
    Dⁿ and Dˣ onto themselves, fixes the query's constants and leaves τ unchanged."""
    q = A.query
    qconst = {t for a in q.body for t in a.args if not is_var(t)}
    ans = answers(q, D)
    facts = D.sorted_endo()
    out = []
    for i, f1 in enumerate(facts):
        for f2 in facts[i + 1:]:
            pair = _transposition(f1, f2)
            if pair is None or set(pair) & qconst:
                continue
            u, v = pair
            if {_swap(f, u, v) for f in D.endo} != D.endo:
                continue
            if {_swap(f, u, v) for f in D.exo} != D.exo:
                continue
            if any(A.tau(t) != A.tau(tuple(v if c == u else u if c == v else c for c in t))
                   for t in ans):
                continue
            out.append((f1, f2))
    return out


def check_axioms(A: AggregateQuery, D: Database, values: dict) -> AxiomReport:
    missing = [f for f in D.sorted_endo() if f not in values]
    total = sum((values.get(f, Fraction(0)) for f in D.endo), Fraction(0))
    rep = AxiomReport(total, evaluate(A, D) - evaluate(A, exogenous_part(D)), missing=missing)
    used = set()
    for _, facts in homomorphisms(A.query, D.facts):
        used.update(facts)
    for f in D.sorted_endo():
        if f not in used:
            rep.null_players.append(f)
            if values.get(f, 0) != 0:
                rep.null_failures.append((f, values[f]))
    for f1, f2 in interchangeable_pairs(A, D):
        rep.symmetric_pairs.append((f1, f2))
        if values.get(f1) != values.get(f2):
            rep.symmetry_failures.append((f1, f2, values.get(f1), values.get(f2)))
    return rep
