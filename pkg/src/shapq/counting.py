"""Polynomials in k (subset size) with integer coefficients, packed into one
big integer so that convolution becomes a single multiplication.

A table row ``c_0, c_1, ..., c_n`` is stored as ``sum c_k * 2**(W*k)``.  As long
as every coefficient of every stored row lies in ``[0, 2**W)`` the packing is
exact, and subtraction is safe whenever the true result is non-negative.
Subset counts over ``n`` facts never exceed ``2**n``, so ``W = n + 2`` suffices.
"""
from __future__ import annotations


class Packer:
    def __init__(self, n: int, headroom: int = 0):
        self.n = n
        self.W = n + 2 + headroom
        self.mask = (1 << self.W) - 1
        self._binom: dict = {}
        self.z = 1 << self.W

    def binom(self, m: int) -> int:
        """Row C(m, 0..m) packed, i.e. (1 + z)^m."""
        if m not in self._binom:
            self._binom[m] = (1 + self.z) ** m
        return self._binom[m]

    def mono(self, k: int) -> int:
        """z^k: exactly the k given facts chosen."""
        return 1 << (self.W * k)

    def pack(self, row) -> int:
        out = 0
        for k, c in enumerate(row):
            if c < 0 or c >> self.W:
                raise ValueError("coefficient out of packing range")
            out |= int(c) << (self.W * k)
        return out

    def unpack(self, x: int, length: int | None = None) -> list:
        if x < 0:
            raise ValueError("negative packed row")
        length = self.n + 1 if length is None else length
        W, mask = self.W, self.mask
        out = []
        for _ in range(length):
            out.append(x & mask)
            x >>= W
        if x:
            raise ValueError("packed row longer than expected")
        return out

