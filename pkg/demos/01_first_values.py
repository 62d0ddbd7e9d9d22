"""
Shapley values of database facts
================================

A query answer bag is aggregated into one number; every endogenous fact is
a player and the Shapley value splits the aggregate among them.
"""

from fractions import Fraction

from shapq.aggregates import AVG, MAX, AggregateQuery, Identity, evaluate, exogenous_part
from shapq.axioms import check_axioms
from shapq.cq import parse_cq
from shapq.dispatch import dispatch_shapley
from shapq.game import shapley_bruteforce_all
from shapq.model import Database, Fact

# a tiny sales database: R(store, amount), S(store) lists open stores
R = [Fact("R", (1, 10)), Fact("R", (1, 4)), Fact("R", (2, 7))]
S = [Fact("S", (1,)), Fact("S", (2,))]
D = Database.build(endo=R + S[:1], exo=S[1:])

# average amount over open stores; the amount is the second head variable
q = parse_cq("Q(s,a) :- R(s,a), S(s).")
A = AggregateQuery(AVG, Identity(2), q)
print("A(D)  =", evaluate(A, D))
print("A(Dx) =", evaluate(A, exogenous_part(D)))

# q-hierarchical, so the polynomial engine handles Avg
values = {}
for f in D.sorted_endo():
    v, engine = dispatch_shapley(A, D, f)
    values[f] = v
    print(f"{str(f):10} {str(v):>8}  via {engine}")

# every value matches subset enumeration
assert values == shapley_bruteforce_all(A, D)

# and the values satisfy efficiency, null player and symmetry
for line in check_axioms(A, D, values).lines():
    print(line)

# Max instead of Avg: same query, different split
B = A.with_alpha(MAX)
print({str(f): str(dispatch_shapley(B, D, f)[0]) for f in D.sorted_endo()})
print("sum:", sum((dispatch_shapley(B, D, f)[0] for f in D.endo), Fraction(0)))
