"""
Counting set covers with Avg
============================

Shapley values of a single fact under Avg, taken over a family of databases,
form a linear system whose solution counts partial set covers.
"""

from shapq.aggregates import evaluate, exogenous_part
from shapq.gadgets import (
    SAMPLE_COVER, avg_setcover_query, build_avg_setcover_db, count_set_covers,
    cover_counts_by_enumeration, recover_cover_counts_avg)
from shapq.model import Fact

inst = SAMPLE_COVER
print("universe 1..%d, subsets %s" % (inst.n, [sorted(s) for s in inst.subsets]))

# one member of the family: q = 2 padding answers, r = 2 padding players
A = avg_setcover_query()
D, f = build_avg_setcover_db(inst, 2, 2)
print(len(D.endo), "endogenous facts,", len(D.exo), "exogenous facts; probe fact", f)

# A on a few coalitions: every covered element adds an answer with value 0,
# each answer from a padding player adds value 1
base = exogenous_part(D)
for ids in [(1, 3), (1, 3, 6), (1, 2, 6), (1, 2, 0)]:
    E = [Fact("S", (i,)) for i in ids]
    print(f"E = {ids}: A = {evaluate(A, base.with_facts(exo=E))}")

# note: S(1), S(3) only reach elements 1..3, so the coalition (1, 3, 6) gives 1/7;
# covering all four elements needs S(1), S(2)

# solve for Z[i][j] = number of j-subsets of sets covering exactly i elements
Z = recover_cover_counts_avg(inst)
for i, row in enumerate(Z):
    print(i, [int(z) for z in row])
assert Z == cover_counts_by_enumeration(inst)
print("set covers:", sum(Z[inst.n]), "direct count:", count_set_covers(inst))
