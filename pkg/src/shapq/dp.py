"""The generic dynamic program over all-hierarchical CQs.

Tables are dicts mapping a plugin-defined key (for example "number of answers"
or "current maximum") to a packed polynomial in k, see `counting.Packer`.  The
coefficient of z^k is the number of k-subsets of the endogenous facts of the
sub-database that land on that key.

A plugin supplies four operations:

* ``leaf(tau, sat, unsat)`` for a variable-free query whose ground atoms are
  all present (``sat`` counts subsets that make it true, ``unsat`` the rest);
* ``union(t1, t2, free)`` for a split on a root variable (``free`` tells
  whether that variable is in the head, i.e. whether answers are disjoint);
* ``cross(t1, t2)`` for a split into components with disjoint relations;
* ``empty()`` for a sub-database on which the query has no answers at all.

Facts that cannot take part in any homomorphism are folded in with `pad`.
"""
from __future__ import annotations

from .aggregates import ValueFunction, tau_atom_index, tau_on_substituted
from .counting import Packer
from .cq import (
    ConjunctiveQuery,
    classify,
    connected_components,
    consistent_subset,
    is_all_hierarchical,
    root_variables,
    sorted_constants,
    substitute,
    values_variable_can_take,
)
from .errors import NotAllHierarchical, SelfJoin
from .model import Database, Fact, restrict_to_relations


def combine(t1: dict, t2: dict, key) -> dict:
    """Product of two tables: every pair of entries lands on key(k1, k2)."""
    out: dict = {}
    for k1, p1 in t1.items():
        for k2, p2 in t2.items():
            k = key(k1, k2)
            out[k] = out.get(k, 0) + p1 * p2
    return {k: p for k, p in out.items() if p}


class Plugin:
    def __init__(self, packer: Packer):
        self.packer = packer

    def pad(self, t, m: int):
        if m == 0:
            return t
        b = self.packer.binom(m)
        return self.map_polys(t, lambda p: p * b)

    def map_polys(self, t, fn):
        return {k: fn(p) for k, p in t.items()}

    # overridden by engines
    def leaf(self, tau, sat: int, unsat: int):
        raise NotImplementedError

    def empty(self, tau):
        return self.leaf(tau, 0, 1)

    def union(self, t1, t2, free: bool):
        raise NotImplementedError

    def cross(self, t1, t2):
        raise NotImplementedError


def check_dp_query(q: ConjunctiveQuery) -> None:
    if q.has_self_join():
        raise SelfJoin(f"{q} repeats a relation symbol")
    if not is_all_hierarchical(q):
        raise NotAllHierarchical(f"{q} is {classify(q).label()}")


def pick_root(q: ConjunctiveQuery, prefer_free_roots: bool):
    roots = root_variables(q)
    if not roots:
        return None
    if prefer_free_roots:
        for v in q.head:
            if v in roots:
                return v
    for v in q.vars():
        if v in roots:
            return v
    return None


def generic_dp(
    q: ConjunctiveQuery,
    D: Database,
    plugin: Plugin,
    prefer_free_roots: bool = False,
    tau: ValueFunction | None = None,
):
    """Table for (q, D) over all endogenous facts of D.

    ``tau`` (optional) is the value function the plugin tracks; it is attached
    to the component holding the atom it is localized on."""
    check_dp_query(q)
    rels = set(q.relations())
    sub = restrict_to_relations(D, rels & set(D.schema))
    tau_rel = q.body[tau_atom_index(q, tau)].relation if tau is not None else None
    table = _rec(q, sub, plugin, prefer_free_roots, tau, tau_rel)
    return plugin.pad(table, len(D.endo) - len(sub.endo))


def _rec(q, D, plugin, prefer_free, tau, tau_rel):
    if not q.vars():
        return _leaf(q, D, plugin, tau)
    x = pick_root(q, prefer_free)
    if x is not None:
        free = x in q.head
        table = None
        covered = 0
        for a in sorted_constants(values_variable_can_take(q, D, x)):
            Da = consistent_subset(D, q, x, a)
            qa = substitute(q, x, a)
            ta = tau_on_substituted(tau, qa) if tau is not None else None
            t = _rec(qa, Da, plugin, prefer_free, ta, tau_rel)
            covered += len(Da.endo)
            table = t if table is None else plugin.union(table, t, free)
        if table is None:
            table = plugin.empty(tau)
        return plugin.pad(table, len(D.endo) - covered)
    table = None
    for comp in connected_components(q):
        Dc = restrict_to_relations(D, set(comp.relations()))
        ct = None
        if tau is not None and tau_rel in comp.relations():
            ct = tau
            if tau.pos is not None:
                ct = tau.at(comp.head.index(q.head[tau.pos - 1]) + 1)
        t = _rec(comp, Dc, plugin, prefer_free, ct, tau_rel)
        table = t if table is None else plugin.cross(table, t)
    return table


def _leaf(q, D, plugin, tau):
    r = 0
    present = True
    for atom in q.body:
        f = Fact(atom.relation, atom.args)
        if f in D.endo:
            r += 1
        elif f not in D.exo:
            present = False
    P = plugin.packer
    if present:
        sat = P.mono(r)
        t = plugin.leaf(tau, sat, P.binom(r) - sat)
    else:
        t = plugin.leaf(tau, 0, P.binom(r))
    return plugin.pad(t, len(D.endo) - r)
