from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import db, facts
from shapq.errors import DuplicateFact, FactAbsent, FactNotEndogenous, SchemaMismatch, UnknownRelation
from shapq.model import Database, Fact, make_fact_exogenous, remove_fact, restrict_to_relations


def test_make_fact_exogenous_flips_one_fact():
    D = db(["R(1)"])
    F = make_fact_exogenous(D, Fact("R", (1,)))
    assert F.endo == frozenset() and F.exo == {Fact("R", (1,))}
    D = db(["R(1)"], ["S(2)"])
    F = make_fact_exogenous(D, Fact("R", (1,)))
    assert F.exo == set(facts("R(1)", "S(2)"))


def test_make_fact_exogenous_rejects_exogenous():
    with pytest.raises(FactNotEndogenous):
        make_fact_exogenous(db([], ["R(1)"]), Fact("R", (1,)))


def test_remove_fact():
    assert remove_fact(db(["R(1)", "R(2)"]), Fact("R", (2,))).endo == {Fact("R", (1,))}
    G = remove_fact(db(["R(1)"]), Fact("R", (1,)))
    assert len(G) == 0 and G.schema == {"R": 1}
    with pytest.raises(FactAbsent):
        remove_fact(db(["R(1)"]), Fact("R", (2,)))


def test_restrict_to_relations():
    D = db(["R(1)", "S(2)"])
    assert restrict_to_relations(D, {"R"}).facts == {Fact("R", (1,))}
    assert restrict_to_relations(D, {"R", "S"}) == D
    assert len(restrict_to_relations(db(["R(1)"]), set())) == 0
    with pytest.raises(UnknownRelation):
        restrict_to_relations(D, {"T"})


def test_validation():
    with pytest.raises(DuplicateFact):
        Database({"R": 1}, {Fact("R", (1,))}, {Fact("R", (1,))})
    with pytest.raises(SchemaMismatch):
        Database({"R": 2}, {Fact("R", (1,))})
    with pytest.raises(UnknownRelation):
        Database({"R": 1}, {Fact("S", (1,))})
    with pytest.raises(DuplicateFact):
        Database.build(facts("R(1)", "R(1)"))


def test_fact_printing_and_order():
    assert str(Fact("R", (1, "a"))) == "R(1,'a')"
    fs = sorted(facts("R('b')", "R(2)", "R(-1)"), key=Fact.sort_key)
    assert [str(f) for f in fs] == ["R(-1)", "R(2)", "R('b')"]


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=8, unique=True), st.data())
def test_exogenous_flip_keeps_fact_set(vals, data):
    D = Database.build([Fact("R", (v,)) for v in vals])
    f = Fact("R", (data.draw(st.sampled_from(vals)),))
    F = make_fact_exogenous(D, f)
    assert len(F.endo) == len(D.endo) - 1 and F.facts == D.facts


@given(st.fractions(), st.fractions().filter(bool))
def test_rational_round_trip(a, c):
    assert (a + c) - c == a and (a * c) / c == a
    assert Fraction(a).denominator > 0
