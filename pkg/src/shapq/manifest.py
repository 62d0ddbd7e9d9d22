"""JSON database manifests and fact selectors.

A manifest looks like::

    {"schema": [{"relation": "R", "arity": 2}, {"relation": "S", "arity": 1}],
     "relations": {"R": [{"tuple": [1, 2], "endogenous": false}],
                   "S": [{"tuple": [2], "endogenous": true}]}}
"""
from __future__ import annotations

import json
from pathlib import Path

from .cq import Var, _Parser
from .errors import DuplicateFact, QuerySyntaxError, SchemaMismatch, UnknownRelation
from .model import Database, Fact


def _constant(v, where: str):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise SchemaMismatch(f"{where}: constants must be integers or strings, got {v!r}")
    return v


def database_from_dict(data: dict) -> Database:
    try:
        schema = {e["relation"]: int(e["arity"]) for e in data["schema"]}
    except (KeyError, TypeError) as e:
        raise SchemaMismatch(f"malformed schema entry: {e}") from None
    endo, exo, seen = [], [], set()
    for rel, rows in data.get("relations", {}).items():
        if rel not in schema:
            raise UnknownRelation(f"relation {rel} is not declared in the schema")
        for row in rows:
            args = tuple(_constant(v, rel) for v in row["tuple"])
            f = Fact(rel, args)
            if f in seen:
                raise DuplicateFact(f"{f} listed twice")
            seen.add(f)
            (endo if row.get("endogenous", True) else exo).append(f)
    return Database(schema, frozenset(endo), frozenset(exo))


def database_to_dict(D: Database) -> dict:
    rels: dict = {r: [] for r in sorted(D.schema)}
    for f in sorted(D.facts, key=Fact.sort_key):
        rels[f.relation].append({"tuple": list(f.args), "endogenous": f in D.endo})
    return {"schema": [{"relation": r, "arity": D.schema[r]} for r in sorted(D.schema)],
            "relations": rels}


def load_database(path: str | Path) -> Database:
    with open(path, encoding="utf-8") as fh:
        return database_from_dict(json.load(fh))


def dump_database(D: Database, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(database_to_dict(D), fh, indent=2)
        fh.write("\n")


def parse_fact(text: str) -> Fact:
    """Parse a selector such as ``R(1,'a')``."""
    p = _Parser(text)
    name, args = p.atom(False)
    p.take("eof")
    for a in args:
        if isinstance(a, Var):
            raise QuerySyntaxError(f"fact arguments must be constants, found {a}", 0)
    return Fact(name, args)
