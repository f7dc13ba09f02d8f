"""Structural classification of query hypergraphs.

GYO elimination decides acyclicity and yields a join tree; on top of that sit
the free-connex test, disruptive-trio detection for lexicographic orders, and
a search for the hard substructure (chordless cycle or hyperclique core)
that every cyclic hypergraph contains.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field

from .errors import IsAcyclic, NotAcyclic, OrderMismatch
from .query import Atom, ConjunctiveQuery, Hypergraph, Variable, build_hypergraph


@dataclass(frozen=True)
class RemoveVertex:
    vertex: Variable
    edge: int | None  # index of the single edge holding the vertex, None if isolated


@dataclass(frozen=True)
class RemoveEdge:
    edge: int
    absorbed_by: int | None  # None only for the last (empty) edge


@dataclass
class GyoTrace:
    edges: list[frozenset[Variable]]
    steps: list[RemoveVertex | RemoveEdge] = field(default_factory=list)

    def replay(self) -> bool:
        """Re-apply the steps from scratch; True iff everything gets removed."""
        current = {i: set(e) for i, e in enumerate(self.edges)}
        vertices = set().union(*self.edges) if self.edges else set()
        for step in self.steps:
            if isinstance(step, RemoveVertex):
                holders = [i for i, e in current.items() if step.vertex in e]
                if step.vertex not in vertices or len(holders) > 1:
                    return False
                if holders and holders[0] != step.edge:
                    return False
                vertices.discard(step.vertex)
                for i in holders:
                    current[i].discard(step.vertex)
            else:
                if step.edge not in current:
                    return False
                if step.absorbed_by is None:
                    if len(current) != 1 or current[step.edge]:
                        return False
                elif step.absorbed_by not in current or step.absorbed_by == step.edge:
                    return False
                elif not current[step.edge] <= current[step.absorbed_by]:
                    return False
                del current[step.edge]
        return not current and not vertices


def _gyo(edges: list[frozenset], rng: random.Random | None = None):
    """GYO elimination over an indexed edge list (duplicates allowed).

    Returns ``(acyclic, trace, parent)`` where ``parent[i]`` is the edge that
    absorbed edge ``i`` (``-1`` for the last one standing).  Without ``rng``
    ties are broken by smallest vertex name, then smallest edge.
    """
    current = {i: set(e) for i, e in enumerate(edges)}
    vertices = set().union(*edges) if edges else set()
    trace = GyoTrace(list(edges))
    parent = [-1] * len(edges)

    def edge_key(i):
        return (sorted(current[i]), i)

    while current or vertices:
        occ: dict[Variable, list[int]] = {v: [] for v in vertices}
        for i, e in current.items():
            for v in e:
                occ[v].append(i)
        vertex_moves = [v for v, hs in occ.items() if len(hs) <= 1]
        edge_moves = []
        alive = sorted(current, key=edge_key)
        for i in alive:
            for j in alive:
                if i != j and current[i] <= current[j]:
                    edge_moves.append((i, j))
                    break
        if not vertex_moves and not edge_moves:
            if len(current) == 1 and not vertices:
                (last,) = current
                trace.steps.append(RemoveEdge(last, None))
                del current[last]
                continue
            return False, trace, parent
        if rng is not None:
            moves = [("v", v) for v in vertex_moves] + [("e", m) for m in edge_moves]
            kind, move = rng.choice(moves)
        elif vertex_moves:
            kind, move = "v", min(vertex_moves)
        else:
            kind, move = "e", edge_moves[0]
        if kind == "v":
            holders = occ[move]
            trace.steps.append(RemoveVertex(move, holders[0] if holders else None))
            vertices.discard(move)
            for i in holders:
                current[i].discard(move)
        else:
            i, j = move
            if rng is not None:
                # any absorbing edge will do; pick one at random
                js = [k for k in current if k != i and current[i] <= current[k]]
                j = rng.choice(js)
            trace.steps.append(RemoveEdge(i, j))
            parent[i] = j
            del current[i]
    return True, trace, parent


def gyo_acyclicity(h: Hypergraph, rng: random.Random | None = None) -> tuple[bool, GyoTrace]:
    ok, trace, _ = _gyo(h.sorted_edges(), rng)
    return ok, trace


def is_acyclic(h: Hypergraph) -> bool:
    return gyo_acyclicity(h)[0]


@dataclass
class JoinTree:
    """Rooted tree over hyperedges; ``parent[root] == -1``.

    ``atom_node[k]`` names the node into which body atom ``k`` is folded
    (only set for trees built from a query).
    """

    nodes: list[frozenset[Variable]]
    parent: list[int]
    atom_node: list[int] = field(default_factory=list)

    @property
    def root(self) -> int:
        return self.parent.index(-1)

    def children(self) -> list[list[int]]:
        kids: list[list[int]] = [[] for _ in self.nodes]
        for i, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(i)
        return kids

    def preorder(self) -> list[int]:
        kids = self.children()
        out, stack = [], [self.root]
        while stack:
            n = stack.pop()
            out.append(n)
            stack.extend(reversed(kids[n]))
        return out

    def postorder(self) -> list[int]:
        return self.preorder()[::-1]

    def rerooted(self, new_root: int) -> "JoinTree":
        adj: list[list[int]] = [[] for _ in self.nodes]
        for i, p in enumerate(self.parent):
            if p >= 0:
                adj[i].append(p)
                adj[p].append(i)
        parent = [-2] * len(self.nodes)
        parent[new_root] = -1
        queue = deque([new_root])
        while queue:
            n = queue.popleft()
            for m in adj[n]:
                if parent[m] == -2:
                    parent[m] = n
                    queue.append(m)
        return JoinTree(list(self.nodes), parent, list(self.atom_node))

    def is_tree(self) -> bool:
        if self.parent.count(-1) != 1:
            return False
        seen = set(self.preorder())
        return len(seen) == len(self.nodes)

    def satisfies_running_intersection(self) -> bool:
        """Marker test: for each variable, BFS over the marked nodes must reach all of them."""
        if not self.is_tree():
            return False
        adj: list[list[int]] = [[] for _ in self.nodes]
        for i, p in enumerate(self.parent):
            if p >= 0:
                adj[i].append(p)
                adj[p].append(i)
        for v in set().union(*self.nodes) if self.nodes else ():
            marked = {i for i, e in enumerate(self.nodes) if v in e}
            start = next(iter(marked))
            seen, queue = {start}, deque([start])
            while queue:
                n = queue.popleft()
                for m in adj[n]:
                    if m in marked and m not in seen:
                        seen.add(m)
                        queue.append(m)
            if seen != marked:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "nodes": [sorted(n) for n in self.nodes],
            "parent": list(self.parent),
            "atom_node": list(self.atom_node),
        }


def _tree_from_edges(edges: list[frozenset]) -> JoinTree:
    ok, _, parent = _gyo(edges)
    if not ok:
        raise NotAcyclic("hypergraph is cyclic; no join tree exists")
    return JoinTree(list(edges), parent)


def build_join_tree(h: Hypergraph) -> JoinTree:
    """Join tree whose nodes are the maximal hyperedges of ``h``."""
    return _tree_from_edges(h.maximal_edges())


def query_join_tree(q: ConjunctiveQuery) -> JoinTree:
    """Join tree of ``q`` with every atom attached to a node covering it."""
    tree = build_join_tree(build_hypergraph(q))
    tree.atom_node = [_covering_node(tree.nodes, a) for a in q.body]
    return tree


def _covering_node(nodes, atom: Atom) -> int:
    for i, n in enumerate(nodes):
        if atom.variables <= n:
            return i
    raise NotAcyclic(f"no node covers atom {atom}")


def connex_tree(q: ConjunctiveQuery) -> tuple[JoinTree, int]:
    """Join tree over the maximal edges of ``q`` plus the head set, rooted at the head node.

    Node indices ``0..len-2`` coincide with ``query_join_tree(q).nodes``; the
    head node is the last one and is returned as the second component.
    """
    h = build_hypergraph(q)
    edges = h.maximal_edges() + [frozenset(q.head)]
    ok, _, parent = _gyo(edges)
    if not ok:
        raise NotAcyclic("hypergraph plus head edge is cyclic")
    s = len(edges) - 1
    tree = JoinTree(edges, parent).rerooted(s)
    tree.atom_node = [_covering_node(edges[:-1], a) for a in q.body]
    return tree, s


def is_free_connex(q: ConjunctiveQuery) -> bool:
    h = build_hypergraph(q)
    return gyo_acyclicity(h)[0] and gyo_acyclicity(h.add_edge(q.head))[0]


# --------------------------------------------------------------------------
# disruptive trios


@dataclass(frozen=True)
class DisruptiveTrio:
    y1: Variable
    y2: Variable
    y3: Variable

    def __iter__(self):
        return iter((self.y1, self.y2, self.y3))


def _check_order(q: ConjunctiveQuery, order) -> list[Variable]:
    order = list(order)
    if len(order) != len(set(order)) or set(order) != q.variables:
        raise OrderMismatch(
            f"order {order} is not a permutation of the body variables {sorted(q.variables)}"
        )
    return order


def find_disruptive_trios(q: ConjunctiveQuery, order) -> list[DisruptiveTrio]:
    order = _check_order(q, order)
    h = build_hypergraph(q)
    out = []
    for k, y3 in enumerate(order):
        earlier = [y for y in order[:k] if h.co_occur(y, y3)]
        for a, b in itertools.combinations(earlier, 2):
            if not h.co_occur(a, b):
                out.append(DisruptiveTrio(a, b, y3))
    return out


# --------------------------------------------------------------------------
# hard substructures of cyclic hypergraphs


@dataclass(frozen=True)
class HardWitness:
    kind: str  # "cycle" or "clique"
    vertices: tuple[Variable, ...]

    def to_json(self) -> dict:
        return {"kind": self.kind, "vertices": list(self.vertices)}


def _maximal(edges) -> set[frozenset]:
    es = {frozenset(e) for e in edges if e}
    return {e for e in es if not any(e < f for f in es)}


def _cycle_order(s: frozenset, edges: set[frozenset]) -> tuple | None:
    """Vertex order if ``edges`` is exactly a single cycle through ``s``."""
    if len(s) < 3 or len(edges) != len(s) or any(len(e) != 2 for e in edges):
        return None
    adj: dict = {v: [] for v in s}
    for e in edges:
        a, b = tuple(e)
        adj[a].append(b)
        adj[b].append(a)
    if any(len(n) != 2 for n in adj.values()):
        return None
    start = min(s)
    walk = [start, min(adj[start])]
    while len(walk) < len(s):
        a, b = adj[walk[-1]]
        walk.append(a if a != walk[-2] else b)
    if walk[0] not in adj[walk[-1]] or len(set(walk)) != len(s):
        return None
    return tuple(walk)


def _is_clique_core(s: frozenset, edges: set[frozenset]) -> bool:
    if len(s) < 3:
        return False
    want = {frozenset(c) for c in itertools.combinations(s, len(s) - 1)}
    return edges == want


def check_witness(h: Hypergraph, w: HardWitness) -> bool:
    s = frozenset(w.vertices)
    if not s <= h.vertices or len(s) != len(w.vertices):
        return False
    edges = _maximal(h.induced(s).edges)
    if w.kind == "cycle":
        if len(s) < 3 or _cycle_order(s, edges) is None:
            return False
        # listed order must walk the cycle
        k = len(w.vertices)
        return all(
            frozenset((w.vertices[i], w.vertices[(i + 1) % k])) in edges for i in range(k)
        )
    if w.kind == "clique":
        return _is_clique_core(s, edges)
    return False


def find_hard_witness(h: Hypergraph) -> HardWitness:
    if gyo_acyclicity(h)[0]:
        raise IsAcyclic("acyclic hypergraphs have no hard witness")
    vertices = sorted(h.vertices)
    for size in range(3, len(vertices) + 1):
        candidates = [frozenset(c) for c in itertools.combinations(vertices, size)]
        for s in candidates:
            order = _cycle_order(s, _maximal(h.induced(s).edges))
            if order is not None:
                return HardWitness("cycle", order)
        for s in candidates:
            if _is_clique_core(s, _maximal(h.induced(s).edges)):
                return HardWitness("clique", tuple(sorted(s)))
    raise AssertionError("cyclic hypergraph without a witness")  # every cyclic hypergraph has one


def structure_report(q: ConjunctiveQuery, order=None) -> dict:
    h = build_hypergraph(q)
    acyclic = gyo_acyclicity(h)[0]
    report = {
        "acyclic": acyclic,
        "free_connex": is_free_connex(q),
        "join_tree": build_join_tree(h).parent if acyclic else None,
        "join_tree_nodes": [sorted(n) for n in build_join_tree(h).nodes] if acyclic else None,
        "trios": [],
        "witness": None if acyclic else find_hard_witness(h).to_json(),
    }
    if q.is_join_query:
        order = list(order) if order is not None else list(q.head)
        report["order"] = order
        report["trios"] = [list(t) for t in find_disruptive_trios(q, order)]
    return report
