"""Exact integer arithmetic in Z[2cos(pi/k1)] x ... x Z[2cos(pi/kr)].

Entries of the geometric reflection matrices of a triangle group live in the
ring generated over Z by the numbers 2cos(pi/k) for the finite rotation
orders k of the presentation.  Elements are stored as int64 coefficient
vectors over the tensor-product power basis, so equality of group elements
is exact equality of vectors and no floating tolerance enters vertex
identification.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import sympy


@lru_cache(maxsize=None)
def minpoly_2cos(k: int) -> tuple[int, ...]:
    """Monic minimal polynomial of 2cos(pi/k) over Q, ascending coefficients."""
    x = sympy.Symbol("x")
    poly = sympy.minimal_polynomial(2 * sympy.cos(sympy.pi / k), x)
    coeffs = [int(c) for c in reversed(sympy.Poly(poly, x).all_coeffs())]
    return tuple(coeffs)


class CosineRing:
    """Power-basis arithmetic for the tensor ring of several 2cos(pi/k).

    Orders 2 and 3 have rational cosines (0 and 1) and contribute no basis
    factor; every order >= 4 contributes one factor of degree deg(minpoly).
    """

    def __init__(self, orders):
        self.factors = sorted({k for k in orders if k >= 4})
        self.degrees = []
        self.companions = []
        for k in self.factors:
            mp = minpoly_2cos(k)
            d = len(mp) - 1
            comp = np.zeros((d, d), dtype=np.int64)
            for j in range(d - 1):
                comp[j + 1, j] = 1
            comp[:, d - 1] -= np.array(mp[:d], dtype=np.int64)
            self.degrees.append(d)
            self.companions.append(comp)
        self.dim = int(np.prod(self.degrees)) if self.degrees else 1

    def _embed(self, idx: int, mat: np.ndarray) -> np.ndarray:
        """Kronecker-embed a factor-local matrix into the full basis."""
        out = np.eye(1, dtype=np.int64)
        for i, d in enumerate(self.degrees):
            block = mat if i == idx else np.eye(d, dtype=np.int64)
            out = np.kron(out, block)
        return out

    def one(self) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.int64)
        e[0] = 1
        return e

    def integer(self, n: int) -> np.ndarray:
        return n * self.one()

    def mul_by_2cos(self, k: int) -> np.ndarray:
        """Matrix of multiplication by 2cos(pi/k) acting on coefficient rows.

        The companion matrix acts on coefficient columns; row vectors in the
        ascending power basis need its transpose.
        """
        if k == 2:
            return np.zeros((self.dim, self.dim), dtype=np.int64)
        if k == 3:
            return np.eye(self.dim, dtype=np.int64)
        idx = self.factors.index(k)
        return self._embed(idx, self.companions[idx].T.copy())

    def basis_mul_matrix(self, i: int) -> np.ndarray:
        """Matrix of multiplication by the i-th basis monomial."""
        out = np.eye(1, dtype=np.int64)
        rest = i
        for f in range(len(self.factors) - 1, -1, -1):
            d = self.degrees[f]
            e = rest % d
            rest //= d
            out = np.kron(
                np.linalg.matrix_power(self.companions[f], e).astype(np.int64), out
            )
        return out

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Exact product of two ring elements."""
        acc = np.zeros(self.dim, dtype=object)
        for i, ai in enumerate(a):
            if ai:
                acc = acc + int(ai) * (self.basis_mul_matrix(i).astype(object) @ b.astype(object))
        return acc

    def basis_values(self) -> np.ndarray:
        """Float values of the basis monomials, for numeric evaluation."""
        vals = np.array([1.0])
        for f, k in enumerate(self.factors):
            root = 2.0 * math.cos(math.pi / k)
            powers = root ** np.arange(self.degrees[f])
            vals = np.kron(vals, powers)
        return vals

    def to_float(self, a) -> float:
        return float(np.dot(np.asarray(a, dtype=float), self.basis_values()))


def reflection_tensors(orders: dict[tuple[int, int], int], ring: CosineRing) -> np.ndarray:
    """Column-update tensors W for right multiplication by a generator.

    For s != t, (P sigma_s) column t equals P_t + P_s * 2cos(pi/order(s,t)),
    and column s flips sign; W[s, t] holds the corresponding [dim, dim]
    coefficient-space matrix so the update is P_t + P_s @ W[s, t] for all t.
    """
    dim = ring.dim
    W = np.zeros((3, 3, dim, dim), dtype=np.int64)
    for s in range(3):
        for t in range(3):
            if s == t:
                W[s, t] = -2 * np.eye(dim, dtype=np.int64)
            else:
                W[s, t] = ring.mul_by_2cos(orders[(s, t)])
    return W
