"""Exact n-step return probabilities of the simple random walk on a ball.

A walk of length <= n from the base point never leaves the ball of radius
n, so distributing mass 1/3 per edge inside a ball of radius >= n_max gives
the exact infinite-graph return probabilities.  The even-step envelope
p^(2n)^(1/2n) is a nondecreasing certified lower bound for the spectral
radius.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coxeter import CayleyBall
from .errors import HorizonExceedsBall


@dataclass
class ReturnSeries:
    n_max: int
    values: list
    mode: str

    def envelope_sequence(self) -> list[float]:
        """e_n = p^(2n) ** (1/(2n)) for 2n <= n_max."""
        out = []
        for n in range(1, self.n_max // 2 + 1):
            out.append(float(self.values[2 * n]) ** (1.0 / (2 * n)))
        return out


def return_probabilities(ball: CayleyBall, n_max: int,
                         mode: str = "rational") -> ReturnSeries:
    """p^(k)(x0, x0) for k = 0..n_max; exact Fractions or doubles."""
    if n_max > ball.radius:
        raise HorizonExceedsBall(
            f"horizon {n_max} exceeds ball radius {ball.radius}"
        )
    nbr = ball.neighbor_table()
    if mode == "rational":
        values: list = [Fraction(1)]
        dist: dict[int, Fraction] = {0: Fraction(1)}
        for _ in range(n_max):
            new: dict[int, Fraction] = {}
            for v, mass in dist.items():
                share = mass / 3
                for g in range(3):
                    w = int(nbr[v, g])
                    if w >= 0:
                        new[w] = new.get(w, Fraction(0)) + share
            dist = new
            values.append(dist.get(0, Fraction(0)))
        return ReturnSeries(n_max=n_max, values=values, mode="rational")
    if mode == "float":
        V = ball.n_vertices
        vec = np.zeros(V)
        vec[0] = 1.0
        values = [1.0]
        for _ in range(n_max):
            new = np.zeros(V)
            for g in range(3):
                w = nbr[:, g]
                ok = w >= 0
                np.add.at(new, w[ok], vec[ok] / 3.0)
            vec = new
            values.append(float(vec[0]))
        return ReturnSeries(n_max=n_max, values=values, mode="float")
    raise ValueError(f"unknown oracle mode: {mode!r}")


def empirical_envelope(rs: ReturnSeries) -> float:
    """max_n p^(2n)^(1/2n), a lower bound for the spectral radius."""
    seq = rs.envelope_sequence()
    return max(seq) if seq else 0.0


def tree_return_series(n_max: int) -> ReturnSeries:
    """Exact SRW return probabilities on the 3-regular tree.

    Walks from the root are counted by their distance profile, a lattice
    path with 3 upward choices at the root and 2 elsewhere; the count DP
    is exact in integers and p^(k) = walks_k(0) / 3^k.
    """
    counts = {0: 1}
    values: list = [Fraction(1)]
    for k in range(1, n_max + 1):
        new: dict[int, int] = {}
        for h, c in counts.items():
            up = 3 if h == 0 else 2
            new[h + 1] = new.get(h + 1, 0) + c * up
            if h > 0:
                new[h - 1] = new.get(h - 1, 0) + c
        counts = new
        values.append(Fraction(counts.get(0, 0), 3 ** k))
    return ReturnSeries(n_max=n_max, values=values, mode="rational")
