"""
Permanents through duplicate detection, and embedding one query in another
==========================================================================
"""

import random

from shapq.aggregates import AVG, DUP, AggregateQuery, Identity
from shapq.cq import parse_cq
from shapq.gadgets import Q_XYY, embed_qxyy, matching_counts, permanent, recover_matching_counts_dup
from shapq.game import shapley_bruteforce_all
from shapq.model import Database, Fact

# matchings of a bipartite graph from Shapley values under Dup
M = [[1, 1, 0],
     [0, 1, 1],
     [1, 1, 1]]
Z = recover_matching_counts_dup(M)
print("j-matchings:", [int(z) for z in Z])
print("direct:     ", matching_counts(M))
print("permanent:", int(Z[len(M)]), "=", permanent(M))

# a random database for Q(x) :- R(x,y), S(y)
rng = random.Random(3)
facts = sorted({Fact("R", (rng.randint(0, 3), rng.randint(0, 2))) for _ in range(5)}
               | {Fact("S", (rng.randint(0, 2),)) for _ in range(3)}, key=Fact.sort_key)
D = Database.build(facts, [], {"R": 2, "S": 1})

# move it into a larger query with the same bad variable pattern
E = embed_qxyy(parse_cq("Q(x) :- A(x,y,z), B(y,z), C(z)."), D)
for f, g in sorted(E.h.items(), key=lambda p: p[0].sort_key()):
    print(f"{str(f):8} -> {g}")

# the game on endogenous facts is unchanged
for alpha in (AVG, DUP):
    A = AggregateQuery(alpha, Identity(1), Q_XYY)
    src = shapley_bruteforce_all(A, D)
    dst = shapley_bruteforce_all(E.aggregate_query(A), E.database)
    print(alpha, all(src[f] == dst[E.h[f]] for f in D.endo))
