"""
Which queries admit a polynomial algorithm
==========================================

Tractability depends on the aggregate and on how the query's variables nest.
"""

from shapq.aggregates import AVG, CDIST, COUNT, DUP, MAX, MEDIAN, MIN, SUM, AggregateQuery, ConstantVF, Identity
from shapq.cli import class_report, summary_line
from shapq.cq import parse_cq
from shapq.dispatch import plan

queries = [
    "Q(x) :- R(x,y), S(x).",
    "Q(x,y) :- R(x,y), S(x).",
    "Q(x) :- R(x,y), S(y).",
    "Q(x) :- R(x), S(x,y), T(y).",
    "Q(x) :- R(x,y), S(y,z), T(z).",
    "Q() :- R(x), S(x,y), T(y).",
]
aggs = [SUM, COUNT, MIN, MAX, CDIST, AVG, MEDIAN, DUP]

# the class of each query, with a witness for the first test it fails
for text in queries:
    print(f"{text:32} {summary_line(class_report(parse_cq(text)))}")

# routing table: engine name, or "-" where the combination is refused
print()
print(" " * 32 + "".join(f"{str(a):>10}" for a in aggs))
for text in queries:
    q = parse_cq(text)
    tau = ConstantVF(1) if q.is_boolean() else Identity(1)
    cells = []
    for a in aggs:
        tag, err = plan(AggregateQuery(a, tau, q))
        cells.append(tag if err is None else "-")
    print(f"{text:32}" + "".join(f"{c:>10}" for c in cells))

# the reason attached to a refusal
_, err = plan(AggregateQuery(AVG, Identity(1), parse_cq("Q(x) :- R(x,y), S(y).")))
print()
print(type(err).__name__ + ":", err)
