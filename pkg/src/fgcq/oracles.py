"""Exhaustive solvers for the source problems of the reductions.

These are deliberately direct transcriptions of the problem definitions,
independent of the query engine, and capped to desk-scale inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import InstanceTooLarge

MAX_GRAPH_VERTICES = 2000
MAX_3SUM = 500
MAX_CLIQUE_SUBSETS = math.comb(60, 6)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1, optionally edge-weighted."""

    n: int
    edges: frozenset[tuple[int, int]]
    weights: dict | None = None

    @classmethod
    def build(cls, n: int, edges, weights=None) -> "Graph":
        norm = set()
        wmap = {} if weights is not None else None
        for k, (u, v) in enumerate(edges):
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
            e = (min(u, v), max(u, v))
            norm.add(e)
            if wmap is not None:
                wmap[e] = weights[k] if isinstance(weights, (list, tuple)) else weights[(u, v)]
        return cls(n, frozenset(norm), wmap)

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def weight(self, u: int, v: int):
        return self.weights[(min(u, v), max(u, v))]

    def neighbours(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return nb

    def symmetric_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in self.edges] + [(v, u) for u, v in self.edges]


def _cap_graph(g: Graph):
    if g.n > MAX_GRAPH_VERTICES:
        raise InstanceTooLarge(f"{g.n} vertices exceeds cap {MAX_GRAPH_VERTICES}")


def _cap_subsets(n: int, k: int):
    if math.comb(n, k) > MAX_CLIQUE_SUBSETS:
        raise InstanceTooLarge(f"C({n},{k}) subsets exceeds cap")


def brute_triangle(g: Graph) -> bool:
    _cap_graph(g)
    for a, b, c in itertools.combinations(range(g.n), 3):
        if g.adjacent(a, b) and g.adjacent(b, c) and g.adjacent(a, c):
            return True
    return False


def brute_hyperclique(n: int, edges, k: int) -> bool:
    """Is there a k-set of vertices all of whose h-subsets are edges?"""
    es = {frozenset(e) for e in edges}
    if not es:
        return False
    h = len(next(iter(es)))
    _cap_subsets(n, k)
    for s in itertools.combinations(range(n), k):
        if all(frozenset(c) in es for c in itertools.combinations(s, h)):
            return True
    return False


def brute_dominating_set(g: Graph, size: int) -> bool:
    """Does ``g`` have a dominating set with at most ``size`` vertices?"""
    _cap_graph(g)
    nb = g.neighbours()
    for k in range(0, min(size, g.n) + 1):
        _cap_subsets(g.n, k)
        for s in itertools.combinations(range(g.n), k):
            chosen = set(s)
            if all(v in chosen or nb[v] & chosen for v in range(g.n)):
                return True
    return False


def brute_3sum(a, b, c) -> bool:
    if max(len(a), len(b), len(c)) > MAX_3SUM:
        raise InstanceTooLarge("3SUM lists exceed cap")
    targets = set(c)
    return any(x + y in targets for x in a for y in b)


def sorted_merge_3sum(a, b, c) -> bool:
    """All pairwise sums, sorted, merged against sorted C."""
    sums = sorted(x + y for x in a for y in b)
    cs = sorted(c)
    i = j = 0
    while i < len(sums) and j < len(cs):
        if sums[i] == cs[j]:
            return True
        if sums[i] < cs[j]:
            i += 1
        else:
            j += 1
    return False


def _cliques(g: Graph, size: int):
    _cap_graph(g)
    _cap_subsets(g.n, size)
    for s in itertools.combinations(range(g.n), size):
        if all(g.adjacent(u, v) for u, v in itertools.combinations(s, 2)):
            yield s


def brute_kclique(g: Graph, size: int) -> bool:
    return next(_cliques(g, size), None) is not None


def count_cliques(g: Graph, size: int) -> int:
    return sum(1 for _ in _cliques(g, size))


def brute_min_weight_clique(g: Graph, size: int) -> float:
    """Minimum total edge weight over all ``size``-cliques; +inf if none."""
    best = math.inf
    for s in _cliques(g, size):
        best = min(best, sum(g.weight(u, v) for u, v in itertools.combinations(s, 2)))
    return best


def brute_zero_clique(g: Graph, size: int) -> bool:
    for s in _cliques(g, size):
        if sum(g.weight(u, v) for u, v in itertools.combinations(s, 2)) == 0:
            return True
    return False
