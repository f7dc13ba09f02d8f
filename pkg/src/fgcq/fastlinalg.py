"""Boolean matrix multiplication and the clique detectors built on it.

Two multiplication strategies are provided.  ``naive`` keeps rows and
columns as Python integers used as bit sets and computes every output entry
as a word-parallel AND of a row with a column (n^2 inner products of n/64
words).  ``strassen`` runs Strassen's recursion exactly over int64 blocks and
saturates the integer product to {0, 1}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import DataError, DimensionMismatch, SelfLoop, UnsupportedK


@dataclass(frozen=True)
class BoolMatrix:
    n: int
    rows: tuple[int, ...]  # bit j of rows[i] is entry (i, j)

    @classmethod
    def zeros(cls, n: int) -> "BoolMatrix":
        return cls(n, (0,) * n)

    @classmethod
    def identity(cls, n: int) -> "BoolMatrix":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_coords(cls, n: int, coords: Iterable[tuple[int, int]]) -> "BoolMatrix":
        rows = [0] * n
        for i, j in coords:
            i, j = int(i), int(j)  # numpy ints would overflow the shift
            if not (0 <= i < n and 0 <= j < n):
                raise DimensionMismatch(f"coordinate ({i}, {j}) outside {n}x{n}")
            rows[i] |= 1 << j
        return cls(n, tuple(rows))

    @classmethod
    def from_array(cls, a) -> "BoolMatrix":
        a = np.asarray(a)
        n = a.shape[0]
        return cls.from_coords(n, zip(*np.nonzero(a)))

    def coords(self) -> list[tuple[int, int]]:
        out = []
        for i, r in enumerate(self.rows):
            while r:
                low = r & -r
                out.append((i, low.bit_length() - 1))
                r ^= low
        return out

    def to_array(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for i, j in self.coords():
            a[i, j] = 1
        return a

    def transpose(self) -> "BoolMatrix":
        return BoolMatrix.from_coords(self.n, ((j, i) for i, j in self.coords()))

    def get(self, i: int, j: int) -> bool:
        return bool(self.rows[i] >> j & 1)


@dataclass(frozen=True)
class MultiplyStrategy:
    name: str
    omega: float
    cutoff: int = 64

    def multiply(self, a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
        return bmm(a, b, self)


NAIVE = MultiplyStrategy("naive", 3.0)
STRASSEN = MultiplyStrategy("strassen", math.log2(7))
STRATEGIES = {"naive": NAIVE, "strassen": STRASSEN}


def _naive(a: BoolMatrix, b: BoolMatrix) -> BoolMatrix:
    cols = b.transpose().rows
    out = []
    for row in a.rows:
        acc = 0
        if row:
            for j, col in enumerate(cols):
                if row & col:
                    acc |= 1 << j
        out.append(acc)
    return BoolMatrix(a.n, tuple(out))


def _strassen(x: np.ndarray, y: np.ndarray, cutoff: int) -> np.ndarray:
    n = x.shape[0]
    if n <= cutoff:
        return x @ y
    h = n // 2
    a11, a12, a21, a22 = x[:h, :h], x[:h, h:], x[h:, :h], x[h:, h:]
    b11, b12, b21, b22 = y[:h, :h], y[:h, h:], y[h:, :h], y[h:, h:]
    m1 = _strassen(a11 + a22, b11 + b22, cutoff)
    m2 = _strassen(a21 + a22, b11, cutoff)
    m3 = _strassen(a11, b12 - b22, cutoff)
    m4 = _strassen(a22, b21 - b11, cutoff)
    m5 = _strassen(a11 + a12, b22, cutoff)
    m6 = _strassen(a21 - a11, b11 + b12, cutoff)
    m7 = _strassen(a12 - a22, b21 + b22, cutoff)
    out = np.empty_like(x)
    out[:h, :h] = m1 + m4 - m5 + m7
    out[:h, h:] = m3 + m5
    out[h:, :h] = m2 + m4
    out[h:, h:] = m1 - m2 + m3 + m6
    return out


def _divide_and_conquer(a: BoolMatrix, b: BoolMatrix, cutoff: int) -> BoolMatrix:
    n = a.n
    size = max(1, cutoff)
    while size < n:
        size *= 2
    x = np.zeros((size, size), dtype=np.int64)
    y = np.zeros((size, size), dtype=np.int64)
    x[:n, :n] = a.to_array()
    y[:n, :n] = b.to_array()
    c = _strassen(x, y, cutoff)[:n, :n]
    return BoolMatrix.from_array(c != 0)


def bmm(a: BoolMatrix, b: BoolMatrix, strategy: MultiplyStrategy = NAIVE) -> BoolMatrix:
    if a.n != b.n:
        raise DimensionMismatch(f"cannot multiply {a.n}x{a.n} by {b.n}x{b.n}")
    if strategy.name == "naive":
        return _naive(a, b)
    if strategy.name == "strassen":
        return _divide_and_conquer(a, b, strategy.cutoff)
    raise ValueError(f"unknown strategy {strategy.name!r}")


def load_matrix(path) -> BoolMatrix:
    lines = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise DataError(f"{path}: empty matrix file")
    n = int(lines[0])
    coords = []
    for ln in lines[1:]:
        i, j = (int(x) for x in ln.split(","))
        coords.append((i, j))
    return BoolMatrix.from_coords(n, coords)


# --------------------------------------------------------------------------
# triangles


def _adjacency(edges) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {}
    for u, v in edges:
        if u == v:
            raise SelfLoop(f"self-loop at {u}")
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return adj


def light_phase(adj: dict[int, set[int]], light: set[int]) -> bool:
    """Triangles through a light vertex: walk its wedges and probe the edge set."""
    for y in light:
        nbrs = list(adj[y])
        for i, x in enumerate(nbrs):
            ax = adj[x]
            for z in nbrs[i + 1:]:
                if z in ax:
                    return True
    return False


def heavy_phase(adj: dict[int, set[int]], heavy: set[int], strategy: MultiplyStrategy) -> bool:
    """Triangles on heavy vertices only: square the heavy adjacency matrix."""
    if len(heavy) < 3:
        return False
    ids = {v: k for k, v in enumerate(sorted(heavy))}
    coords = [(ids[u], ids[v]) for u in heavy for v in adj[u] if v in ids]
    a = BoolMatrix.from_coords(len(ids), coords)
    c = bmm(a, a, strategy)
    return any(cr & ar for cr, ar in zip(c.rows, a.rows))


def ayz_threshold(m: int, omega: float) -> float:
    return m ** ((omega - 1) / (omega + 1)) if m else 0.0


def ayz_triangle(edges, strategy: MultiplyStrategy = NAIVE, delta: float | None = None) -> bool:
    """Triangle detection with the light/heavy degree split.

    The degree of a vertex is its number of incident edges; ``delta``
    defaults to m^((w-1)/(w+1)) for the strategy's exponent w.
    """
    adj = _adjacency(edges)
    m = sum(len(n) for n in adj.values()) // 2
    if delta is None:
        delta = ayz_threshold(m, strategy.omega)
    light = {v for v, n in adj.items() if len(n) <= delta}
    heavy = set(adj) - light
    return light_phase(adj, light) or heavy_phase(adj, heavy, strategy)


def dense_triangle(edges, strategy: MultiplyStrategy = NAIVE) -> bool:
    """Baseline: one dense product of the full adjacency matrix, no degree split."""
    adj = _adjacency(edges)
    return heavy_phase(adj, set(adj), strategy)


def np_kclique(edges, k: int, strategy: MultiplyStrategy = NAIVE) -> bool:
    """k-clique detection for k divisible by 3 via triangles among (k/3)-cliques."""
    if k < 3 or k % 3:
        raise UnsupportedK(f"k={k} is not a positive multiple of 3")
    adj = _adjacency(edges)
    r = k // 3
    if r == 1:
        return ayz_triangle(edges, strategy)
    small = [
        frozenset(c)
        for c in itertools.combinations(sorted(adj), r)
        if all(b in adj[a] for a, b in itertools.combinations(c, 2))
    ]
    derived = []
    for c1, c2 in itertools.combinations(small, 2):
        if c1.isdisjoint(c2) and all(v in adj[u] for u in c1 for v in c2):
            derived.append((c1, c2))
    if not derived:
        return False
    ids = {c: i for i, c in enumerate(small)}
    return ayz_triangle([(ids[a], ids[b]) for a, b in derived], strategy)


def sparse_bmm_via_star(a_coords, b_coords) -> list[tuple[int, int]]:
    """Non-zeros of AB as the answers of q(x1,x2) :- R1(x1,z), R2(x2,z) with R2 = B^T."""
    from .engine import enumerate_answers
    from .query import star_query
    from .storage import Database

    q = star_query(2, self_joins=False)
    db = Database.from_values(
        {"R1": list(a_coords), "R2": [(j, k) for k, j in b_coords]},
        arities={"R1": 2, "R2": 2},
    )
    out = {db.extern(t) for t in enumerate_answers(q, db, superlinear=True)}
    return sorted(out)
