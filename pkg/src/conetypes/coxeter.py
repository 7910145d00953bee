"""Triangle-group elements and exact Cayley-graph balls.

The group Delta(l,m,n) = <L,M,N | L^2 = M^2 = N^2 = (LM)^n = (MN)^l = (NL)^m>
is realized through its geometric reflection representation.  Balls of the
Cayley graph are built breadth first with exact integer coordinates (see
ring.py), so two words represent the same element iff their coefficient
tensors are identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    CapExceeded,
    IdentificationAmbiguity,
    InvalidParameter,
    MemoryCap,
    NonHyperbolic,
)
from .ring import CosineRing, reflection_tensors

COEFF_GUARD = 2 ** 57
DEFAULT_MAX_VERTICES = 8_000_000


class Generator(IntEnum):
    L = 0
    M = 1
    N = 2


GEN_NAMES = ("L", "M", "N")


@dataclass(frozen=True)
class GroupParams:
    """Validated exponent triple (l, m, n), in the order given."""

    l: int
    m: int
    n: int

    def triple(self) -> tuple[int, int, int]:
        return (self.l, self.m, self.n)

    def orders(self) -> dict[tuple[int, int], int]:
        """Rotation order of each ordered generator pair: LM->n, MN->l, NL->m."""
        l, m, n = self.l, self.m, self.n
        return {(0, 1): n, (1, 0): n, (1, 2): l, (2, 1): l, (2, 0): m, (0, 2): m}

    def angle_sum(self) -> Fraction:
        return Fraction(1, self.l) + Fraction(1, self.m) + Fraction(1, self.n)

    def name(self) -> str:
        return f"Delta({self.l},{self.m},{self.n})"


def new_params(l: int, m: int, n: int) -> GroupParams:
    """Validate a hyperbolic triple; order is preserved."""
    for v in (l, m, n):
        if not isinstance(v, (int, np.integer)) or v < 2:
            raise InvalidParameter(f"exponents must be integers >= 2, got {(l, m, n)}")
    p = GroupParams(int(l), int(m), int(n))
    if p.angle_sum() >= 1:
        raise NonHyperbolic(f"1/l+1/m+1/n = {p.angle_sum()} >= 1 for {(l, m, n)}")
    return p


@dataclass(frozen=True)
class ReflectionRep:
    """Geometric representation: sigma_s = I - 2 e_s (B e_s)^T."""

    sigma: tuple[np.ndarray, np.ndarray, np.ndarray]
    gram: np.ndarray


def reflection_rep(params: GroupParams) -> ReflectionRep:
    orders = params.orders()
    B = np.eye(3)
    for (s, t), k in orders.items():
        B[s, t] = -np.cos(np.pi / k)
    sigmas = []
    for s in range(3):
        e = np.zeros(3)
        e[s] = 1.0
        sigmas.append(np.eye(3) - 2.0 * np.outer(e, B @ e))
    return ReflectionRep(sigma=tuple(sigmas), gram=B)


def free_reduce(word) -> tuple[int, ...]:
    """Cancel adjacent equal letters (the involutions s^2 = e)."""
    out: list[int] = []
    for g in word:
        if out and out[-1] == int(g):
            out.pop()
        else:
            out.append(int(g))
    return tuple(out)


def _braid_run(a: int, b: int, length: int) -> tuple[int, ...]:
    return tuple(a if i % 2 == 0 else b for i in range(length))


@lru_cache(maxsize=65536)
def _geodesic_closure(triple: tuple[int, int, int], word: tuple[int, ...]) -> frozenset:
    """All geodesic words of the element, via braid moves plus cancellation."""
    orders = GroupParams(*triple).orders()
    current = free_reduce(word)
    while True:
        seen = {current}
        queue = [current]
        shorter = None
        while queue and shorter is None:
            w = queue.pop()
            for i in range(len(w)):
                for j in range(3):
                    a = w[i]
                    if j == a:
                        continue
                    k = orders[(a, j)]
                    if i + k > len(w) or w[i:i + k] != _braid_run(a, j, k):
                        continue
                    v = w[:i] + _braid_run(j, a, k) + w[i + k:]
                    r = free_reduce(v)
                    if len(r) < len(v):
                        shorter = r
                        break
                    if v not in seen:
                        seen.add(v)
                        queue.append(v)
                if shorter is not None:
                    break
        if shorter is None:
            return frozenset(seen)
        current = shorter


def tits_equal(params: GroupParams, w1, w2, cap: int = 24) -> bool:
    """Exact word-problem oracle by exhaustive braid-move closure."""
    w1 = tuple(int(g) for g in w1)
    w2 = tuple(int(g) for g in w2)
    if len(w1) + len(w2) > cap:
        raise CapExceeded(f"total word length {len(w1) + len(w2)} exceeds cap {cap}")
    c1 = _geodesic_closure(params.triple(), w1)
    c2 = _geodesic_closure(params.triple(), w2)
    g1 = next(iter(c1))
    g2 = next(iter(c2))
    if len(g1) != len(g2):
        return False
    return min(c1) == min(c2)


@dataclass
class BallVertex:
    """Per-vertex view assembled on demand from the ball arrays."""

    id: int
    norm: int
    key: tuple
    word: tuple[int, ...]


@dataclass
class CayleyBall:
    """Radius-R ball of the Cayley graph with exact vertex identification."""

    params: GroupParams
    radius: int
    norms: np.ndarray
    offsets: np.ndarray
    edges: np.ndarray
    parent: np.ndarray
    parent_gen: np.ndarray
    _succ: np.ndarray | None = field(default=None, repr=False)
    _nsucc: np.ndarray | None = field(default=None, repr=False)
    _npred: np.ndarray | None = field(default=None, repr=False)
    _nbr: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_vertices(self) -> int:
        return int(self.norms.size)

    def sphere_sizes(self) -> np.ndarray:
        return np.diff(self.offsets)

    def representative_word(self, v: int) -> tuple[int, ...]:
        """A geodesic word for vertex v, read off the BFS parent chain."""
        out = []
        while v != 0:
            out.append(int(self.parent_gen[v]))
            v = int(self.parent[v])
        return tuple(reversed(out))

    def canonical_key(self, v: int) -> tuple:
        """Exact coefficient tensor of the vertex matrix, as a flat tuple."""
        ring = CosineRing(self.params.orders().values())
        W = reflection_tensors(self.params.orders(), ring)
        mat = np.zeros((3, 3, ring.dim), dtype=np.int64)
        for i in range(3):
            mat[i, i] = ring.one()
        for g in self.representative_word(v):
            out = np.empty_like(mat)
            for t in range(3):
                out[:, t, :] = mat[:, t, :] + mat[:, g, :] @ W[g, t]
            mat = out
        return tuple(int(c) for c in mat.reshape(-1))

    def vertex(self, v: int) -> BallVertex:
        return BallVertex(
            id=v,
            norm=int(self.norms[v]),
            key=self.canonical_key(v),
            word=self.representative_word(v),
        )

    def successor_table(self):
        """CSR-like successor table: succ[v] lists up-neighbors, padded with -1."""
        if self._succ is None:
            V = self.n_vertices
            u = self.edges[:, 0].astype(np.int64)
            v = self.edges[:, 1].astype(np.int64)
            nsucc = np.bincount(u, minlength=V)
            npred = np.bincount(v, minlength=V)
            width = int(nsucc.max()) if V > 1 else 0
            succ = -np.ones((V, width), dtype=np.int64)
            order = np.argsort(u, kind="stable")
            us = u[order]
            vs = v[order]
            starts = np.zeros(V, dtype=np.int64)
            starts[1:] = np.cumsum(nsucc)[:-1]
            slot = np.arange(us.size) - starts[us]
            succ[us, slot] = vs
            self._succ, self._nsucc, self._npred = succ, nsucc, npred
        return self._succ, self._nsucc, self._npred

    def neighbor_table(self) -> np.ndarray:
        """nbr[v, g] is the g-neighbor of v, or -1 outside the ball."""
        if self._nbr is None:
            nbr = -np.ones((self.n_vertices, 3), dtype=np.int64)
            u = self.edges[:, 0]
            v = self.edges[:, 1]
            g = self.edges[:, 2]
            nbr[u, g] = v
            nbr[v, g] = u
            self._nbr = nbr
        return self._nbr

    def successors(self, v: int) -> list[int]:
        succ, nsucc, _ = self.successor_table()
        return [int(s) for s in succ[v] if s >= 0]

    def predecessors(self, v: int) -> list[int]:
        nbr = self.neighbor_table()
        return [int(w) for w in nbr[v] if w >= 0 and self.norms[w] < self.norms[v]]

    def to_json(self) -> str:
        doc = {
            "params": list(self.params.triple()),
            "radius": self.radius,
            "vertices": [{"id": i, "norm": int(n)} for i, n in enumerate(self.norms)],
            "edges": [[int(u), int(v), GEN_NAMES[g]] for u, v, g in self.edges],
        }
        return json.dumps(doc, sort_keys=True)

    def to_adjacency_csv(self) -> str:
        lines = ["vertex,norm,neighbors"]
        nbr = self.neighbor_table()
        for v in range(self.n_vertices):
            ns = " ".join(str(int(w)) for w in nbr[v] if w >= 0)
            lines.append(f"{v},{int(self.norms[v])},{ns}")
        return "\n".join(lines) + "\n"


def build_ball(params: GroupParams, radius: int,
               max_vertices: int = DEFAULT_MAX_VERTICES) -> CayleyBall:
    """Breadth-first exact construction of the radius-R ball.

    Each frontier vertex is expanded along its non-predecessor generators;
    bipartiteness guarantees all candidates live on the next sphere, so
    deduplication is a per-layer exact row unique.  Vertex ids are
    deterministic: (norm, coefficient-row lexicographic order).
    """
    if radius < 1:
        raise InvalidParameter("radius must be >= 1")
    orders = params.orders()
    ring = CosineRing(orders.values())
    W = reflection_tensors(orders, ring)
    dim = ring.dim

    mats = np.zeros((1, 3, 3, dim), dtype=np.int64)
    for i in range(3):
        mats[0, i, i] = ring.one()
    down = np.zeros((1, 3), dtype=bool)
    layer_ids = np.array([0], dtype=np.int64)

    norms = [np.zeros(1, dtype=np.int16)]
    offsets = [0, 1]
    edge_chunks = []
    parent = [np.array([-1], dtype=np.int64)]
    parent_gen = [np.array([-1], dtype=np.int16)]
    total = 1

    for k in range(radius):
        cand_list, par_list, gen_list = [], [], []
        for s in range(3):
            mask = ~down[:, s]
            if not mask.any():
                continue
            sub = mats[mask]
            out = np.empty_like(sub)
            for t in range(3):
                out[:, :, t, :] = sub[:, :, t, :] + sub[:, :, s, :] @ W[s, t]
            cand_list.append(out)
            par_list.append(layer_ids[mask])
            gen_list.append(np.full(int(mask.sum()), s, dtype=np.int64))
        cand = np.concatenate(cand_list)
        pars = np.concatenate(par_list)
        gens = np.concatenate(gen_list)

        keys = cand.reshape(cand.shape[0], -1)
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        n_new = uniq.shape[0]
        if int(np.abs(uniq).max(initial=0)) >= COEFF_GUARD:
            raise IdentificationAmbiguity(
                f"coefficient guard 2^57 exhausted at radius {k + 1}"
            )
        total += n_new
        if total > max_vertices:
            raise MemoryCap(f"ball would exceed {max_vertices} vertices at radius {k + 1}")

        base = offsets[-1]
        child_ids = base + inv
        edge_chunks.append(
            np.column_stack([pars, child_ids, gens]).astype(np.int64)
        )
        new_down = np.zeros((n_new, 3), dtype=bool)
        new_down[inv, gens] = True

        first = np.full(n_new, -1, dtype=np.int64)
        first_gen = np.full(n_new, -1, dtype=np.int64)
        # last write wins; reverse order makes the lowest-index parent canonical
        order = np.arange(inv.size - 1, -1, -1)
        first[inv[order]] = pars[order]
        first_gen[inv[order]] = gens[order]

        norms.append(np.full(n_new, k + 1, dtype=np.int16))
        parent.append(first)
        parent_gen.append(first_gen.astype(np.int16))
        offsets.append(base + n_new)

        mats = uniq.reshape(n_new, 3, 3, dim)
        down = new_down
        layer_ids = np.arange(base, base + n_new, dtype=np.int64)

    edges = np.concatenate(edge_chunks)
    edges = edges[np.lexsort((edges[:, 2], edges[:, 1], edges[:, 0]))]
    return CayleyBall(
        params=params,
        radius=radius,
        norms=np.concatenate(norms),
        offsets=np.array(offsets, dtype=np.int64),
        edges=edges,
        parent=np.concatenate(parent),
        parent_gen=np.concatenate(parent_gen),
    )
