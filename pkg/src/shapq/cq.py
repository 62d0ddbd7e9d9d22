"""Conjunctive queries: representation, text syntax, hierarchy classes and the
structural operations used by the dynamic program."""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from typing import Iterable

from .errors import QuerySyntaxError, UnknownVariable, UnsafeHead
from .model import Constant, Database, Fact, const_key, format_constant


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


def is_var(t) -> bool:
    return isinstance(t, Var)


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple

    def vars(self) -> set:
        return {t for t in self.args if isinstance(t, Var)}

    def __str__(self) -> str:
        return f"{self.relation}({','.join(_term_str(t) for t in self.args)})"


def _term_str(t) -> str:
    return t.name if isinstance(t, Var) else format_constant(t)


@dataclass(frozen=True)
class SubstitutionRecord:
    """What the latest `substitute` call removed from the head."""

    var: Var
    value: Constant
    positions: tuple  # 0-based positions in the head before substitution


@dataclass(frozen=True)
class ConjunctiveQuery:
    head: tuple
    body: tuple
    name: str = "Q"
    record: SubstitutionRecord | None = None

    # -- variable bookkeeping -------------------------------------------------
    def vars(self) -> list:
        """All variables in order of first occurrence (head first)."""
        seen: dict = {}
        for v in self.head:
            seen.setdefault(v, None)
        for a in self.body:
            for t in a.args:
                if isinstance(t, Var):
                    seen.setdefault(t, None)
        return list(seen)

    def free_vars(self) -> set:
        return set(self.head)

    def existential_vars(self) -> set:
        return set(self.vars()) - set(self.head)

    def atoms_of(self, x: Var) -> frozenset:
        """Indices of the body atoms that contain x."""
        return frozenset(i for i, a in enumerate(self.body) if x in a.args)

    def relations(self) -> list:
        return [a.relation for a in self.body]

    def is_boolean(self) -> bool:
        return not self.head

    def has_self_join(self) -> bool:
        rels = self.relations()
        return len(set(rels)) != len(rels)

    def boolean(self) -> "ConjunctiveQuery":
        return ConjunctiveQuery((), self.body, self.name)

    def __str__(self) -> str:
        return format_cq(self)


# ---------------------------------------------------------------------------
# parsing and printing

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>:-|<-)|(?P<int>-?\d+)|(?P<str>'(?:[^'\\]|\\.)*'|\"(?:[^\"\\]|\\.)*\")"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),.]))"
)


def _tokenize(text: str) -> list:
    toks, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        val = m.group(kind)
        toks.append((kind, val, start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


def _unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.fresh = itertools.count(1)

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str, value: str | None = None):
        tok = self.toks[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise QuerySyntaxError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def term(self, in_head: bool):
        kind, val, pos = self.peek()
        if kind == "ident":
            self.i += 1
            if val == "_":
                if in_head:
                    raise QuerySyntaxError("anonymous variable in head", pos)
                return Var(f"_{next(self.fresh)}")
            if val[0].isupper():
                raise QuerySyntaxError(
                    f"{val!r} starts with an uppercase letter; quote symbolic constants", pos)
            return Var(val)
        if in_head:
            raise QuerySyntaxError("head arguments must be variables", pos)
        if kind == "int":
            self.i += 1
            return int(val)
        if kind == "str":
            self.i += 1
            return _unquote(val)
        raise QuerySyntaxError(f"expected a term, found {val or 'end of input'!r}", pos)

    def atom(self, in_head: bool):
        _, name, pos = self.take("ident")
        if not name[0].isalpha():
            raise QuerySyntaxError(f"bad relation name {name!r}", pos)
        self.take("punct", "(")
        args = []
        if self.peek()[1] != ")":
            args.append(self.term(in_head))
            while self.peek()[1] == ",":
                self.i += 1
                args.append(self.term(in_head))
        self.take("punct", ")")
        return name, tuple(args)

    def query(self) -> ConjunctiveQuery:
        name, head = self.atom(True)
        self.take("arrow")
        body = [Atom(*self.atom(False))]
        while self.peek()[1] == ",":
            self.i += 1
            body.append(Atom(*self.atom(False)))
        if self.peek()[1] == ".":
            self.i += 1
        self.take("eof")
        return ConjunctiveQuery(tuple(head), tuple(body), name)


def parse_cq(text: str) -> ConjunctiveQuery:
    """Parse ``Name(v1,...) :- A1, ..., Am .``; the final period is optional."""
    q = _Parser(text).query()
    body_vars = set().union(*(a.vars() for a in q.body))
    for v in q.head:
        if v not in body_vars:
            raise UnsafeHead(f"head variable {v} does not occur in the body")
    return q


def format_cq(q: ConjunctiveQuery) -> str:
    counts: dict = {}
    for a in q.body:
        for t in a.args:
            if isinstance(t, Var):
                counts[t] = counts.get(t, 0) + 1

    def show(t):
        if isinstance(t, Var) and t.name.startswith("_") and counts[t] == 1 and t not in q.head:
            return "_"
        return _term_str(t)

    head = ",".join(v.name for v in q.head)
    body = ", ".join(f"{a.relation}({','.join(show(t) for t in a.args)})" for a in q.body)
    return f"{q.name}({head}) :- {body}."


# ---------------------------------------------------------------------------
# hierarchy classes


class HierarchyClass(enum.IntEnum):
    NotExistsHierarchical = 0
    ExistsHierarchical = 1
    AllHierarchical = 2
    QHierarchical = 3
    SQHierarchical = 4

    def label(self) -> str:
        return {
            0: "not ∃-hierarchical",
            1: "∃-hierarchical",
            2: "all-hierarchical",
            3: "q-hierarchical",
            4: "sq-hierarchical",
        }[int(self)]


def _check_vars(q: ConjunctiveQuery, V: Iterable[Var]) -> list:
    allv = set(q.vars())
    V = list(V)
    for v in V:
        if v not in allv:
            raise UnknownVariable(str(v))
    return V


def hierarchy_witness(q: ConjunctiveQuery, V: Iterable[Var]):
    """A pair of variables of V whose atom sets overlap without nesting, or None."""
    V = sorted(_check_vars(q, V), key=lambda v: v.name)
    for x, y in itertools.combinations(V, 2):
        ax, ay = q.atoms_of(x), q.atoms_of(y)
        if ax & ay and not (ax <= ay or ay <= ax):
            return (x, y)
    return None


def hierarchical_wrt(q: ConjunctiveQuery, V: Iterable[Var]) -> bool:
    return hierarchy_witness(q, V) is None


def q_witness(q: ConjunctiveQuery):
    """(free y, existential x) with atoms(y) strictly inside atoms(x), or None."""
    for y in q.vars():
        if y not in q.free_vars():
            continue
        for x in q.vars():
            if x not in q.free_vars() and q.atoms_of(y) < q.atoms_of(x):
                return (y, x)
    return None


def sq_witness(q: ConjunctiveQuery):
    """(free y, any x) with atoms(y) strictly inside atoms(x), or None."""
    for y in q.vars():
        if y not in q.free_vars():
            continue
        for x in q.vars():
            if q.atoms_of(y) < q.atoms_of(x):
                return (y, x)
    return None


def is_exists_hierarchical(q: ConjunctiveQuery) -> bool:
    return hierarchical_wrt(q, q.existential_vars())


def is_all_hierarchical(q: ConjunctiveQuery) -> bool:
    return hierarchical_wrt(q, q.vars())


def is_q_hierarchical(q: ConjunctiveQuery) -> bool:
    return is_all_hierarchical(q) and q_witness(q) is None


def is_sq_hierarchical(q: ConjunctiveQuery) -> bool:
    return is_all_hierarchical(q) and sq_witness(q) is None


def classify(q: ConjunctiveQuery) -> HierarchyClass:
    if not is_all_hierarchical(q):
        if is_exists_hierarchical(q):
            return HierarchyClass.ExistsHierarchical
        return HierarchyClass.NotExistsHierarchical
    if sq_witness(q) is None:
        return HierarchyClass.SQHierarchical
    if q_witness(q) is None:
        return HierarchyClass.QHierarchical
    return HierarchyClass.AllHierarchical


# ---------------------------------------------------------------------------
# structural operations


def root_variables(q: ConjunctiveQuery) -> set:
    everything = frozenset(range(len(q.body)))
    return {v for v in q.vars() if q.atoms_of(v) == everything}


def connected_components(q: ConjunctiveQuery) -> list:
    n = len(q.body)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for v in q.vars():
        idx = sorted(q.atoms_of(v))
        for j in idx[1:]:
            parent[find(j)] = find(idx[0])
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    comps = []
    for members in sorted(groups.values()):
        body = tuple(q.body[i] for i in members)
        vs = set().union(*(a.vars() for a in body))
        head = tuple(v for v in q.head if v in vs)
        comps.append(ConjunctiveQuery(head, body, q.name))
    return comps


def substitute(q: ConjunctiveQuery, x: Var, a: Constant) -> ConjunctiveQuery:
    if x not in set(q.vars()):
        raise UnknownVariable(str(x))
    body = tuple(Atom(at.relation, tuple(a if t == x else t for t in at.args)) for at in q.body)
    positions = tuple(i for i, v in enumerate(q.head) if v == x)
    head = tuple(v for v in q.head if v != x)
    return ConjunctiveQuery(head, body, q.name, SubstitutionRecord(x, a, positions))


def match_atom(atom: Atom, fact: Fact, binding: dict | None = None) -> dict | None:
    """Extend `binding` so that atom maps onto fact, or return None."""
    if atom.relation != fact.relation or len(atom.args) != len(fact.args):
        return None
    b = dict(binding or {})
    for t, c in zip(atom.args, fact.args):
        if isinstance(t, Var):
            if b.setdefault(t, c) != c:
                return None
        elif t != c:
            return None
    return b


def values_variable_can_take(q: ConjunctiveQuery, D: Database, x: Var) -> set:
    if x not in set(q.vars()):
        raise UnknownVariable(str(x))
    result = None
    for atom in q.body:
        for pos, t in enumerate(atom.args):
            if t != x:
                continue
            col = {f.args[pos] for f in D.facts
                   if f.relation == atom.relation and len(f.args) == len(atom.args)}
            result = col if result is None else result & col
    return result or set()


def consistent_subset(D: Database, q: ConjunctiveQuery, x: Var, a: Constant) -> Database:
    atoms = {at.relation: at for at in q.body}
    keep_endo = set()
    keep_exo = set()
    for f in D.facts:
        at = atoms.get(f.relation)
        if at is not None and match_atom(at, f, {x: a}) is not None:
            (keep_endo if f in D.endo else keep_exo).add(f)
    schema = {r: k for r, k in D.schema.items() if r in atoms}
    return Database(schema, frozenset(keep_endo), frozenset(keep_exo))


def sorted_constants(values: Iterable[Constant]) -> list:
    return sorted(values, key=const_key)
