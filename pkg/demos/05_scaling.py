"""
Engines against enumeration
===========================

Enumeration doubles with every fact; the counting engines grow polynomially.
"""

import time

import numpy as np

from shapq.aggregates import AVG, DUP, AggregateQuery, Identity
from shapq.cq import parse_cq
from shapq.dispatch import run_engine
from shapq.errors import InstanceTooLarge
from shapq.game import shapley_bruteforce
from shapq.model import Database, Fact

q = parse_cq("Q(x) :- R(x,y), S(x).")


def database(n):
    endo = [Fact("R", (i % 7, i)) for i in range(n // 2)] + [Fact("S", (i,)) for i in range(n - n // 2)]
    return Database.build(endo, [])


def clock(fn):
    t = time.perf_counter()
    fn()
    return time.perf_counter() - t


A = AggregateQuery(AVG, Identity(1), q)
f = Fact("R", (0, 0))
sizes = np.array([8, 12, 16, 18])
brute = np.array([clock(lambda: shapley_bruteforce(A, database(n), f)) for n in sizes])
engine = np.array([clock(lambda: run_engine("avgqnt", A, database(n), f)) for n in sizes])
for n, b, e in zip(sizes, brute, engine):
    print(f"n={n:3d}  enumeration {b:8.3f}s  engine {e:8.3f}s")

# same answers where both run
assert shapley_bruteforce(A, database(12), f) == run_engine("avgqnt", A, database(12), f)

# far beyond enumeration
for n in (50, 100, 200):
    D = database(n)
    print(f"n={n:3d}  avg {clock(lambda: run_engine('avgqnt', A, D, f)):.2f}s"
          f"  dup {clock(lambda: run_engine('dup', A.with_alpha(DUP), D, f)):.2f}s")

try:
    shapley_bruteforce(A, database(200), f)
except InstanceTooLarge as e:
    print("enumeration refused:", e)
