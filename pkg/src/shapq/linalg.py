"""Exact linear algebra over the rationals."""
from __future__ import annotations

import math
from fractions import Fraction
from math import factorial

from .errors import DimensionMismatch, SingularMatrix


def exact_solve(L, a) -> list:
    """Solve L·x = a exactly.

    Rows are scaled to integers, then reduced with fraction-free (Bareiss)
    elimination, choosing the pivot of largest magnitude in each column."""
    n = len(L)
    if n == 0 or any(len(row) != n for row in L):
        raise DimensionMismatch("matrix must be square and non-empty")
    if len(a) != n:
        raise DimensionMismatch(f"right-hand side has {len(a)} entries, expected {n}")
    rows = []
    for row, rhs in zip(L, a):
        vals = [Fraction(v) for v in row] + [Fraction(rhs)]
        s = math.lcm(*(v.denominator for v in vals))
        rows.append([int(v * s) for v in vals])
    prev = 1
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(rows[r][c]))
        if rows[piv][c] == 0:
            raise SingularMatrix(f"no pivot in column {c}")
        rows[c], rows[piv] = rows[piv], rows[c]
        p = rows[c][c]
        for r in range(c + 1, n):
            rr = rows[r]
            f = rr[c]
            for k in range(c + 1, n + 1):
                rr[k] = (rr[k] * p - rows[c][k] * f) // prev
            rr[c] = 0
        prev = p
    x = [Fraction(0)] * n
    for r in range(n - 1, -1, -1):
        s = Fraction(rows[r][n]) - sum(rows[r][k] * x[k] for k in range(r + 1, n))
        x[r] = s / rows[r][r]
    return x


def matmul(A, B) -> list:
    if not A or len(A[0]) != len(B):
        raise DimensionMismatch("inner dimensions differ")
    return [[sum((Fraction(A[i][k]) * B[k][j] for k in range(len(B))), Fraction(0))
             for j in range(len(B[0]))] for i in range(len(A))]


def kron(A, B) -> list:
    """Kronecker product: block (i, j) is A[i][j]·B."""
    p, q = len(B), len(B[0])
    out = [[Fraction(0)] * (len(A[0]) * q) for _ in range(len(A) * p)]
    for i, row in enumerate(A):
        for j, a in enumerate(row):
            for k in range(p):
                for l in range(q):
                    out[i * p + k][j * q + l] = Fraction(a) * B[k][l]
    return out


def identity(n: int) -> list:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def hilbert(n: int, shift: int = 0) -> list:
    """H[i][j] = 1/(i + j + 1 + shift) for 0-based i, j."""
    return [[Fraction(1, i + j + 1 + shift) for j in range(n)] for i in range(n)]


def order_weight_matrix(m: int) -> list:
    """M[r][j] = j!(m+r−j)!/(m+r+1)! for r, j in 0..m.

    In a uniformly random order of m+r+1 players this is the probability that
    a given player is preceded by exactly a given j-subset of the others."""
    return [[Fraction(factorial(j) * factorial(m + r - j), factorial(m + r + 1))
             for j in range(m + 1)] for r in range(m + 1)]


def factorial_hankel(n: int) -> list:
    """M'[r][j] = (r + j + 1)! for 0-based r, j."""
    return [[Fraction(factorial(r + j + 1)) for j in range(n)] for r in range(n)]
