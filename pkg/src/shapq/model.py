"""Constants, facts and databases split into endogenous and exogenous parts.

Constants are plain Python ``int`` (numeric) or ``str`` (symbolic) values.
Numbers that come out of value functions are ``fractions.Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import (
    DuplicateFact,
    FactAbsent,
    FactNotEndogenous,
    SchemaMismatch,
    UnknownRelation,
)

Constant = Union[int, str]
Rational = Fraction


def const_key(c: Constant) -> tuple:
    """Total sort key over mixed constants: integers first, then symbols."""
    if isinstance(c, bool):
        raise TypeError("booleans are not constants")
    return (0, c, "") if isinstance(c, int) else (1, 0, c)


def format_constant(c: Constant) -> str:
    if isinstance(c, int):
        return str(c)
    return "'" + c.replace("\\", "\\\\").replace("'", "\\'") + "'"


@dataclass(frozen=True, order=False)
class Fact:
    relation: str
    args: tuple

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def sort_key(self) -> tuple:
        return (self.relation, tuple(const_key(a) for a in self.args))

    def __str__(self) -> str:
        return f"{self.relation}({','.join(format_constant(a) for a in self.args)})"


@dataclass(frozen=True)
class Database:
    """Immutable database: a schema plus disjoint endogenous and exogenous fact sets."""

    schema: Mapping[str, int]
    endo: frozenset = field(default_factory=frozenset)
    exo: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "schema", dict(self.schema))
        object.__setattr__(self, "endo", frozenset(self.endo))
        object.__setattr__(self, "exo", frozenset(self.exo))
        if self.endo & self.exo:
            dup = min(self.endo & self.exo, key=Fact.sort_key)
            raise DuplicateFact(f"{dup} is both endogenous and exogenous")
        for f in self.endo | self.exo:
            if f.relation not in self.schema:
                raise UnknownRelation(f.relation)
            if len(f.args) != self.schema[f.relation]:
                raise SchemaMismatch(f"{f} does not match arity {self.schema[f.relation]}")

    @classmethod
    def build(
        cls,
        endo: Iterable[Fact] = (),
        exo: Iterable[Fact] = (),
        schema: Mapping[str, int] | None = None,
    ) -> "Database":
        """Create a database, inferring the schema from the facts when not given."""
        endo, exo = list(endo), list(exo)
        sch = dict(schema or {})
        for f in endo + exo:
            if schema is None:
                if sch.setdefault(f.relation, len(f.args)) != len(f.args):
                    raise SchemaMismatch(f"inconsistent arity for {f.relation}")
        if len(set(endo)) != len(endo) or len(set(exo)) != len(exo):
            raise DuplicateFact("a fact is listed twice")
        return cls(sch, frozenset(endo), frozenset(exo))

    @property
    def facts(self) -> frozenset:
        return self.endo | self.exo

    def is_endogenous(self, f: Fact) -> bool:
        return f in self.endo

    def __contains__(self, f: Fact) -> bool:
        return f in self.endo or f in self.exo

    def __len__(self) -> int:
        return len(self.endo) + len(self.exo)

    def sorted_endo(self) -> list:
        return sorted(self.endo, key=Fact.sort_key)

    def relation(self, name: str) -> list:
        """Facts of one relation as (fact, is_endogenous) pairs, sorted."""
        out = [(f, True) for f in self.endo if f.relation == name]
        out += [(f, False) for f in self.exo if f.relation == name]
        out.sort(key=lambda p: p[0].sort_key())
        return out

    def constants(self) -> set:
        return {a for f in self.facts for a in f.args}

    def with_facts(self, endo: Iterable[Fact] = (), exo: Iterable[Fact] = ()) -> "Database":
        return Database(self.schema, self.endo | frozenset(endo), self.exo | frozenset(exo))

    def __str__(self) -> str:
        parts = [str(f) for f in self.sorted_endo()]
        parts += [str(f) + "*" for f in sorted(self.exo, key=Fact.sort_key)]
        return "{" + ", ".join(parts) + "}"


def make_fact_exogenous(D: Database, f: Fact) -> Database:
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    return Database(D.schema, D.endo - {f}, D.exo | {f})


def remove_fact(D: Database, f: Fact) -> Database:
    if f not in D:
        raise FactAbsent(str(f))
    return Database(D.schema, D.endo - {f}, D.exo - {f})


def restrict_to_relations(D: Database, names: Iterable[str]) -> Database:
    names = set(names)
    unknown = names - set(D.schema)
    if unknown:
        raise UnknownRelation(", ".join(sorted(unknown)))
    return Database(
        {r: a for r, a in D.schema.items() if r in names},
        frozenset(f for f in D.endo if f.relation in names),
        frozenset(f for f in D.exo if f.relation in names),
    )
