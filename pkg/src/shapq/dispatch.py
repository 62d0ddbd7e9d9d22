"""Route an aggregate query to the engine that handles its (aggregate, class) pair."""
from __future__ import annotations

from fractions import Fraction

from .aggregates import AggregateQuery, alpha_of_singleton, check_schema
from .cq import HierarchyClass, classify, q_witness, sq_witness
from .engines.avgqnt import avgqnt_shapley
from .engines.boolean import boolean_shapley, cdist_shapley, sumcount_shapley
from .engines.dup import dup_shapley
from .engines.maxmin import max_shapley, min_shapley
from .errors import (
    FactNotEndogenous,
    NotAllHierarchical,
    NotExistsHierarchical,
    NotQHierarchical,
    NotSQHierarchical,
    SelfJoin,
)
from .game import shapley_bruteforce
from .model import Database, Fact

ENGINE_TAGS = ("bruteforce", "boolean", "sumcount", "maxmin", "cdist", "avgqnt", "dup")

# aggregate kind -> (required class, engine tag, error raised when the class test fails)
_REQUIREMENTS = {
    "sum": (HierarchyClass.ExistsHierarchical, "sumcount", NotExistsHierarchical),
    "count": (HierarchyClass.ExistsHierarchical, "sumcount", NotExistsHierarchical),
    "min": (HierarchyClass.AllHierarchical, "maxmin", NotAllHierarchical),
    "max": (HierarchyClass.AllHierarchical, "maxmin", NotAllHierarchical),
    "cdist": (HierarchyClass.AllHierarchical, "cdist", NotAllHierarchical),
    "avg": (HierarchyClass.QHierarchical, "avgqnt", NotQHierarchical),
    "qnt": (HierarchyClass.QHierarchical, "avgqnt", NotQHierarchical),
    "dup": (HierarchyClass.SQHierarchical, "dup", NotSQHierarchical),
}


def _reason(A: AggregateQuery, required: HierarchyClass, actual: HierarchyClass) -> str:
    q = A.query
    msg = f"{required.label()} required for {A.alpha}; {q} is {actual.label()}"
    if required == HierarchyClass.QHierarchical and actual == HierarchyClass.AllHierarchical:
        y, x = q_witness(q)
        msg += f" (free {y}, existential {x}, atoms({y}) ⊊ atoms({x}))"
    elif required == HierarchyClass.SQHierarchical and actual == HierarchyClass.QHierarchical:
        y, x = sq_witness(q)
        msg += f" (free {y}, atoms({y}) ⊊ atoms({x}))"
    return msg


def plan(A: AggregateQuery) -> tuple:
    """(engine tag, None) when a polynomial engine applies, else ("bruteforce", error)."""
    q = A.query
    if q.has_self_join():
        return "bruteforce", SelfJoin(f"{q} repeats a relation symbol")
    cls = classify(q)
    if q.is_boolean():
        # the bag is {{c}} or empty, so A = α({{c}})·[Q is true]
        if alpha_of_singleton(A.alpha, A.tau(())) == 0:
            return "boolean", None
        if cls >= HierarchyClass.AllHierarchical:
            return "boolean", None
        req, _, err = _REQUIREMENTS[A.alpha.kind]
        return "bruteforce", err(_reason(A, req, cls))
    req, tag, err = _REQUIREMENTS[A.alpha.kind]
    if cls >= req:
        return tag, None
    return "bruteforce", err(_reason(A, req, cls))


def run_engine(tag: str, A: AggregateQuery, D: Database, f: Fact) -> Fraction:
    kind = A.alpha.kind
    if tag == "boolean":
        c = alpha_of_singleton(A.alpha, A.tau(()))
        return c * boolean_shapley(A.query, D, f) if c else Fraction(0)
    if tag == "sumcount":
        return sumcount_shapley(A, D, f)
    if tag == "cdist":
        return cdist_shapley(A, D, f)
    if tag == "maxmin":
        return max_shapley(A, D, f) if kind == "max" else min_shapley(A, D, f)
    if tag == "avgqnt":
        return avgqnt_shapley(A, D, f)
    if tag == "dup":
        return dup_shapley(A, D, f)
    raise ValueError(f"unknown engine {tag}")


def dispatch_shapley(
    A: AggregateQuery,
    D: Database,
    f: Fact,
    allow_bruteforce: bool = False,
    cap: int | None = None,
) -> tuple:
    """(Shapley value of f, engine tag)."""
    check_schema(A.query, D)
    if f not in D.endo:
        raise FactNotEndogenous(str(f))
    tag, err = plan(A)
    if err is not None:
        if not allow_bruteforce:
            raise err
        return shapley_bruteforce(A, D, f, cap=cap), "bruteforce"
    return run_engine(tag, A, D, f), tag
