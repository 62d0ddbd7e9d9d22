from fractions import Fraction

import pytest

from helpers import db, facts
from shapq.aggregates import AVG, DUP, MAX, MEDIAN, SUM, AggregateQuery, ConstantVF, Identity
from shapq.cq import parse_cq
from shapq.dispatch import ENGINE_TAGS, dispatch_shapley, plan
from shapq.errors import FactNotEndogenous, NotExistsHierarchical, NotQHierarchical, NotSQHierarchical, SelfJoin

QXYY = parse_cq("Q(x) :- R(x,y), S(y).")


def test_routes():
    assert plan(AggregateQuery(MAX, Identity(1), QXYY)) == ("maxmin", None)
    assert plan(AggregateQuery(AVG, Identity(1), parse_cq("Q(x) :- R(x,y), S(x).")))[0] == "avgqnt"
    assert plan(AggregateQuery(SUM, Identity(1), parse_cq("Q(x) :- R(x), S(x,y), T(y).")))[0] == "sumcount"


def test_refusals():
    tag, err = plan(AggregateQuery(AVG, Identity(1), QXYY))
    assert tag == "bruteforce" and isinstance(err, NotQHierarchical)
    assert "q-hierarchical" in str(err)
    tag, err = plan(AggregateQuery(DUP, Identity(1), parse_cq("Q(x,y) :- R(x,y), S(x).")))
    assert isinstance(err, NotSQHierarchical)
    tag, err = plan(AggregateQuery(SUM, Identity(1), parse_cq("Q(x) :- R(x,y), S(y,z), T(z).")))
    assert isinstance(err, NotExistsHierarchical)
    assert isinstance(plan(AggregateQuery(MAX, Identity(1), parse_cq("Q(x) :- R(x), R(y).")))[1], SelfJoin)


def test_boolean_queries():
    hard = parse_cq("Q() :- R(x), S(x,y), T(y).")
    assert plan(AggregateQuery(DUP, ConstantVF(Fraction(1)), hard)) == ("boolean", None)
    assert plan(AggregateQuery(MEDIAN, ConstantVF(Fraction(0)), hard)) == ("boolean", None)
    assert plan(AggregateQuery(MEDIAN, ConstantVF(Fraction(2)), hard))[0] == "bruteforce"


def test_dispatch_shapley():
    D = db(["R(1,2)", "S(2)"], ["R(2,2)"])
    A = AggregateQuery(AVG, Identity(1), QXYY)
    f = facts("S(2)")[0]
    with pytest.raises(NotQHierarchical):
        dispatch_shapley(A, D, f)
    v, tag = dispatch_shapley(A, D, f, allow_bruteforce=True)
    assert tag == "bruteforce" and v == Fraction(7, 4)
    assert dispatch_shapley(A.with_alpha(MAX), D, f) == (2, "maxmin")
    with pytest.raises(FactNotEndogenous):
        dispatch_shapley(A, D, facts("R(2,2)")[0])


def test_dup_on_sq_query_routes_to_dup():
    tag, err = plan(AggregateQuery(DUP, Identity(1), parse_cq("Q(x) :- R(x).")))
    assert err is None and tag == "dup" and tag in ENGINE_TAGS
