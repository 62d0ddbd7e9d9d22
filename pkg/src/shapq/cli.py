"""Command-line entry point: ``shapq {classify,shapley,axioms,gadget,generate}``.

Exit codes: 0 success, 2 bad input, 3 query outside the tractable class,
4 brute-force size cap exceeded, 5 internal failure (including oracle or
verification mismatches)."""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from . import gadgets
from .aggregates import AggregateQuery, check_schema, parse_agg, parse_tau
from .axioms import check_axioms
from .cq import (
    ConjunctiveQuery,
    classify,
    format_cq,
    hierarchy_witness,
    is_all_hierarchical,
    parse_cq,
    q_witness,
    sq_witness,
)
from .dispatch import ENGINE_TAGS, plan, run_engine
from .errors import (
    FactAbsent,
    FactNotEndogenous,
    InstanceTooLarge,
    IntractableClass,
    SelfJoin,
    ShapqError,
    SingularMatrix,
)
from .game import BruteForceGame, brute_force_cap
from .manifest import database_from_dict, database_to_dict, load_database, parse_fact
from .model import Database, Fact

EXIT_OK, EXIT_INPUT, EXIT_INTRACTABLE, EXIT_CAP, EXIT_INTERNAL = 0, 2, 3, 4, 5


class Mismatch(Exception):
    """A recomputation disagreed with the value it was meant to confirm."""


def decimal_str(x: Fraction, digits: int = 6) -> str:
    with localcontext() as ctx:
        ctx.prec = digits + 40
        return f"{Decimal(x.numerator) / Decimal(x.denominator):.{digits}f}"


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _read_query(text: str) -> ConjunctiveQuery:
    p = Path(text)
    if ":-" not in text and "<-" not in text and p.is_file():
        text = p.read_text(encoding="utf-8")
    return parse_cq(text.strip())


def _agg_query(args, q: ConjunctiveQuery) -> AggregateQuery:
    alpha = parse_agg(args.agg)
    tau = args.tau
    if tau is None:
        tau = "const:1" if q.is_boolean() or alpha.kind == "count" else "id:1"
    return AggregateQuery(alpha, parse_tau(tau), q)


# ---------------------------------------------------------------------------
# classify


def class_report(q: ConjunctiveQuery) -> dict:
    cls = classify(q)
    checks = []
    w = hierarchy_witness(q, q.existential_vars())
    checks.append(("∃-hierarchical", w is None,
                   None if w is None else f"existential {w[0]}, {w[1]} overlap without nesting"))
    w = hierarchy_witness(q, q.vars())
    checks.append(("all-hierarchical", w is None,
                   None if w is None else f"{w[0]}, {w[1]} overlap without nesting"))
    allh = is_all_hierarchical(q)
    w = q_witness(q) if allh else None
    checks.append(("q-hierarchical", allh and w is None,
                   None if w is None else
                   f"free {w[0]}, existential {w[1]}, atoms({w[0]})⊊atoms({w[1]})"))
    w = sq_witness(q) if allh else None
    checks.append(("sq-hierarchical", allh and w is None,
                   None if w is None else f"free {w[0]}, atoms({w[0]})⊊atoms({w[1]})"))
    return {"query": format_cq(q), "class": cls.label(), "self_join": q.has_self_join(),
            "checks": [{"class": c, "pass": ok, "witness": wit} for c, ok, wit in checks]}


def summary_line(rep: dict) -> str:
    line = rep["class"]
    fail = next((c for c in rep["checks"] if not c["pass"] and c["witness"]), None)
    if fail is not None and rep["class"] != "not ∃-hierarchical":
        line += f"; not {fail['class']} (witness: {fail['witness']})"
    elif fail is not None:
        line += f" (witness: {fail['witness']})"
    return line


def cmd_classify(args) -> int:
    q = _read_query(args.query)
    rep = class_report(q)
    if args.format == "json":
        print(json.dumps(rep, indent=2, sort_keys=True, ensure_ascii=False))
        return EXIT_OK
    print(summary_line(rep))
    for c in rep["checks"]:
        mark = "pass" if c["pass"] else "fail"
        print(f"  {c['class']}: {mark}" + (f" ({c['witness']})" if c["witness"] else ""))
    if rep["self_join"]:
        print("  warning: the query repeats a relation symbol")
    return EXIT_OK


# ---------------------------------------------------------------------------
# shapley / axioms


def _select(D: Database, text: str) -> Fact:
    f = parse_fact(text)
    if f in D.exo:
        raise FactNotEndogenous(f"{f} is exogenous")
    if f not in D.endo:
        raise FactAbsent(f"{f} is not in the database")
    return f


def _values(A: AggregateQuery, D: Database, facts: list, engine: str, force: bool,
            cap: int | None) -> tuple:
    """({fact: value}, engine tag)."""
    check_schema(A.query, D)
    if engine == "auto":
        tag, err = plan(A)
        if err is not None:
            if not force:
                raise err
            tag = "bruteforce"
    else:
        tag = engine
    if tag == "bruteforce":
        return BruteForceGame(A, D, cap).values_for(facts), tag
    return {f: run_engine(tag, A, D, f) for f in facts}, tag


def _oracle(A, D, facts, cap) -> dict | None:
    if len(D.endo) > brute_force_cap(cap):
        return None
    return BruteForceGame(A, D, cap).values_for(facts)


def _record(f: Fact, v: Fraction, tag: str, digits: int) -> dict:
    return {"fact": str(f), "value": frac_str(v), "decimal": decimal_str(v, digits), "engine": tag}


def _print_table(rows: list, cols: list) -> None:
    width = {c: max(len(c), *(len(str(r[c])) for r in rows)) if rows else len(c) for c in cols}
    print("  ".join(c.ljust(width[c]) for c in cols).rstrip())
    for r in rows:
        print("  ".join(str(r[c]).ljust(width[c]) for c in cols).rstrip())


def cmd_shapley(args) -> int:
    q = _read_query(args.query)
    A = _agg_query(args, q)
    D = load_database(args.db)
    if args.all:
        facts = D.sorted_endo()
    elif args.fact:
        facts = [_select(D, args.fact)]
    else:
        raise FactAbsent("give --fact or --all")
    start = time.perf_counter()
    vals, tag = _values(A, D, facts, args.engine, args.force_bruteforce, args.cap)
    elapsed = time.perf_counter() - start
    rows = [_record(f, vals[f], tag, args.digits) for f in facts]
    oracle_status = None
    if args.check_oracle:
        ref = _oracle(A, D, facts, args.cap)
        if ref is None:
            oracle_status = "skipped (out of brute-force reach)"
        else:
            bad = [f for f in facts if ref[f] != vals[f]]
            for r, f in zip(rows, facts):
                r["oracle"] = frac_str(ref[f])
            if bad:
                f = bad[0]
                raise Mismatch(f"engine {tag} gives {frac_str(vals[f])} for {f}, "
                               f"brute force gives {frac_str(ref[f])}")
            oracle_status = "agree"
    if args.format == "json":
        out = {"query": format_cq(q), "aggregate": str(A.alpha), "tau": str(A.tau),
               "results": rows}
        if oracle_status:
            out["oracle"] = oracle_status
        if args.timing:
            out["runtime_s"] = round(elapsed, 6)
        print(json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        cols = ["fact", "value", "decimal", "engine"] + (["oracle"] if rows and "oracle" in rows[0] else [])
        _print_table(rows, cols)
        if oracle_status:
            print(f"oracle: {oracle_status}")
        if args.timing:
            print(f"runtime: {elapsed:.3f}s")
    return EXIT_OK


def cmd_axioms(args) -> int:
    q = _read_query(args.query)
    A = _agg_query(args, q)
    D = load_database(args.db)
    facts = D.sorted_endo()
    vals, tag = _values(A, D, facts, args.engine, args.force_bruteforce, args.cap)
    rep = check_axioms(A, D, vals)
    mismatch = None
    if tag != "bruteforce":
        ref = _oracle(A, D, facts, args.cap)
        bad = [f for f in facts if ref is not None and ref[f] != vals[f]]
        if bad:
            mismatch = (bad[0], vals[bad[0]], ref[bad[0]])
    if args.format == "json":
        out = {"engine": tag, "efficiency": rep.efficiency, "null_player": rep.null_player,
               "symmetry": rep.symmetry, "details": rep.lines()[3:],
               "values": {str(f): frac_str(vals[f]) for f in facts}}
        if mismatch:
            out["oracle_mismatch"] = {"fact": str(mismatch[0]), "engine": frac_str(mismatch[1]),
                                      "bruteforce": frac_str(mismatch[2])}
        print(json.dumps(out, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(f"engine: {tag}")
        for line in rep.lines():
            print(line)
        if mismatch:
            f, v, r = mismatch
            print(f"oracle: FAIL at {f}: engine {frac_str(v)}, brute force {frac_str(r)}")
            print("counterexample database:")
            print(json.dumps(database_to_dict(D), sort_keys=True))
    return EXIT_OK if rep.ok and not mismatch else EXIT_INTERNAL


# ---------------------------------------------------------------------------
# gadgets


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _setcover(data: dict) -> gadgets.SetCoverInstance:
    return gadgets.SetCoverInstance(int(data["n"]), tuple(data["subsets"]))


def _shapley_fn(A: AggregateQuery, cap):
    return lambda D, f: BruteForceGame(A, D, cap).values_for([f])[f]


def gadget_setcover_avg(data: dict, cap) -> tuple:
    inst = _setcover(data)
    Z = gadgets.recover_cover_counts_avg(inst, _shapley_fn(gadgets.avg_setcover_query(), cap))
    direct = gadgets.cover_counts_by_enumeration(inst)
    covers = sum(Z[inst.n])
    ok = Z == direct and covers == gadgets.count_set_covers(inst)
    return ok, f"covers: {frac_str(covers)}", {"covers": frac_str(covers),
                                               "Z": [[frac_str(z) for z in row] for row in Z]}


def gadget_setcover_qnt(data: dict, cap) -> tuple:
    inst = _setcover(data)
    q = Fraction(str(data.get("q", "1/2")))
    A = gadgets.qnt_setcover_query(q)
    D = gadgets.build_qnt_setcover_db(inst, q)
    vals = BruteForceGame(A, D, cap).values_for()
    game = {i: gadgets.setcover_game_shapley(inst, i) for i in range(1, inst.m + 1)}
    got = {i: vals[Fact("S", (i,))] for i in game}
    ok = got == game
    text = ", ".join(f"S({i})={frac_str(v)}" for i, v in got.items())
    return ok, f"shapley: {text}", {"q": frac_str(q),
                                    "shapley": {str(i): frac_str(v) for i, v in got.items()},
                                    "game": {str(i): frac_str(v) for i, v in game.items()}}


def gadget_permanent_dup(data: dict, cap) -> tuple:
    M = data["matrix"]
    variant = data.get("variant", "full")
    perm = gadgets.recover_permanent_dup(M, variant, _shapley_fn(gadgets.dup_permanent_query(variant), cap))
    ok = perm == gadgets.permanent(M)
    return ok, f"permanent: {frac_str(perm)}", {"permanent": frac_str(perm), "variant": variant}


def gadget_embed(data: dict, cap) -> tuple:
    target = parse_cq(data["target"])
    D = database_from_dict(data["db"])
    A = AggregateQuery(parse_agg(data.get("agg", "avg")), parse_tau(data.get("tau", "id:1")),
                       gadgets.Q_XYY)
    E = gadgets.embed_qxyy(target, D)
    v1 = BruteForceGame(A, D, cap).values_for()
    v2 = BruteForceGame(E.aggregate_query(A), E.database, cap).values_for()
    ok = all(v1[f] == v2[E.h[f]] for f in D.endo)
    facts = D.sorted_endo()
    return ok, f"preserved: {len(facts)} facts", {
        "target": format_cq(target),
        "values": {str(f): frac_str(v1[f]) for f in facts},
        "embedded": {str(E.h[f]): frac_str(v2[E.h[f]]) for f in facts}}


GADGETS = {"setcover-avg": gadget_setcover_avg, "setcover-qnt": gadget_setcover_qnt,
           "permanent-dup": gadget_permanent_dup, "embed": gadget_embed}


def cmd_gadget(args) -> int:
    try:
        ok, line, detail = GADGETS[args.which](_load_json(args.instance), args.cap)
    except SingularMatrix as e:
        raise AssertionError(f"singular recovery system (this is a bug): {e}") from e
    verdict = "verified" if ok else "MISMATCH"
    if args.format == "json":
        detail["verdict"] = verdict
        print(json.dumps(detail, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(f"{line}, {verdict}")
    return EXIT_OK if ok else EXIT_INTERNAL


# ---------------------------------------------------------------------------
# generate


def random_database(q: ConjunctiveQuery, rng: random.Random, facts: int, domain: int,
                    endo_prob: float) -> Database:
    arity = {a.relation: len(a.args) for a in q.body}
    rels = sorted(arity)
    seen: set = set()
    for _ in range(facts * 20):
        if len(seen) >= facts:
            break
        r = rng.choice(rels)
        seen.add(Fact(r, tuple(rng.randrange(domain) for _ in range(arity[r]))))
    endo, exo = [], []
    for f in sorted(seen, key=Fact.sort_key):
        (endo if rng.random() < endo_prob else exo).append(f)
    return Database(arity, frozenset(endo), frozenset(exo))


def cmd_generate(args) -> int:
    q = _read_query(args.query)
    D = random_database(q, random.Random(args.seed), args.facts, args.domain, args.endo_prob)
    print(json.dumps(database_to_dict(D), indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapq",
                                description="Exact Shapley values of facts for aggregate queries.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="report the hierarchy class of a query")
    c.add_argument("query", help="query text or a file holding it")
    c.add_argument("--format", choices=("table", "json"), default="table")
    c.set_defaults(func=cmd_classify)

    def common(sp):
        sp.add_argument("--db", required=True, help="JSON database manifest")
        sp.add_argument("--query", required=True, help="query text or a file holding it")
        sp.add_argument("--agg", required=True,
                        help="sum|count|cdist|min|max|avg|median|qnt:p/q|dup")
        sp.add_argument("--tau", default=None, help="id:i|gt:b:i|relu:i|const:c")
        sp.add_argument("--engine", choices=("auto",) + ENGINE_TAGS, default="auto")
        sp.add_argument("--force-bruteforce", action="store_true",
                        help="fall back to brute force outside the tractable class")
        sp.add_argument("--cap", type=int, default=None,
                        help="brute-force limit on endogenous facts (default $SHAPQ_CAP or 20)")
        sp.add_argument("--format", choices=("table", "json"), default="table")

    s = sub.add_parser("shapley", help="Shapley values of endogenous facts")
    common(s)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--fact", help="fact selector such as R(1,2)")
    g.add_argument("--all", action="store_true", help="every endogenous fact")
    s.add_argument("--check-oracle", action="store_true",
                   help="recompute by brute force when in reach and compare")
    s.add_argument("--digits", type=int, default=6, help="decimal places of the approximation")
    s.add_argument("--timing", action="store_true", help="include the runtime")
    s.set_defaults(func=cmd_shapley)

    a = sub.add_parser("axioms", help="check efficiency, null player and symmetry")
    common(a)
    a.set_defaults(func=cmd_axioms)

    gd = sub.add_parser("gadget", help="run a counting reduction end to end")
    gd.add_argument("which", choices=sorted(GADGETS))
    gd.add_argument("instance", help="JSON instance description")
    gd.add_argument("--cap", type=int, default=None)
    gd.add_argument("--format", choices=("table", "json"), default="table")
    gd.set_defaults(func=cmd_gadget)

    gen = sub.add_parser("generate", help="random database manifest for a query")
    gen.add_argument("--query", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--facts", type=int, default=10)
    gen.add_argument("--domain", type=int, default=4)
    gen.add_argument("--endo-prob", type=float, default=0.7)
    gen.set_defaults(func=cmd_generate)
    return p


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IntractableClass, SelfJoin) as e:
        print(f"error: {e} (use --force-bruteforce to enumerate)", file=sys.stderr)
        return EXIT_INTRACTABLE
    except InstanceTooLarge as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CAP
    except (ShapqError, OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (Mismatch, AssertionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
