from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shapq.errors import DimensionMismatch, SingularMatrix
from shapq.linalg import exact_solve, hilbert, identity, kron, matmul, order_weight_matrix


def test_hilbert_solve():
    H = hilbert(2)
    assert H[0][0] * H[1][1] - H[0][1] * H[1][0] == Fraction(1, 12)
    assert exact_solve(H, [Fraction(3, 2), Fraction(5, 6)]) == [1, 1]
    assert hilbert(2, shift=1)[0] == [Fraction(1, 2), Fraction(1, 3)]


@given(st.integers(1, 8))
def test_identity_and_hilbert_inverse(n):
    x = [Fraction(i - 3, i + 1) for i in range(n)]
    assert exact_solve(identity(n), x) == x
    H = hilbert(n, shift=1)
    b = [row[0] for row in matmul(H, [[v] for v in x])]
    assert exact_solve(H, b) == x


def test_kronecker_system():
    A, B = order_weight_matrix(2), hilbert(3, shift=1)
    K = kron(A, B)
    assert len(K) == 9 and K[4][5] == A[1][1] * B[1][2]
    x = [Fraction(i) for i in range(9)]
    b = [row[0] for row in matmul(K, [[v] for v in x])]
    assert exact_solve(K, b) == x


def test_errors():
    with pytest.raises(SingularMatrix):
        exact_solve([[1, 2], [2, 4]], [1, 2])
    with pytest.raises(DimensionMismatch):
        exact_solve([[1, 2]], [1])
    with pytest.raises(DimensionMismatch):
        exact_solve([[1]], [1, 2])
    with pytest.raises(DimensionMismatch):
        matmul([[1, 2]], [[1, 2]])
