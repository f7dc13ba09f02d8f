"""Gadget databases that encode classic hard problems as query evaluation.

Each builder turns an instance of a source problem (triangle, hyperclique,
dominating set, Boolean matrix product, 3SUM, min-weight clique) into a
database for a fixed query, so that the query engine answers the source
question.  The ``*_via_*`` deciders run the full round trip and are checked
against the exhaustive solvers in :mod:`fgcq.oracles`.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

from .access import find_weight, materialized_sum_order, sum_order_index
from .engine import count_answers, decide, tropical_aggregate
from .errors import (
    DataError,
    DivisibilityViolation,
    InvalidEmbedding,
    InvalidInstance,
    NoCoveringAtom,
    NoDisjointPair,
    NonBinaryAtom,
    NotCyclic,
    UniformityMismatch,
)
from .oracles import Graph
from .query import (
    Atom,
    ConjunctiveQuery,
    build_hypergraph,
    cycle_query,
    loomis_whitney_query,
    star_query,
)
from .storage import Database, Domain, Relation, WeightMap
from .structure import find_hard_witness, gyo_acyclicity

DUMMY = "#"


@dataclass(frozen=True)
class UniformHypergraphInstance:
    n: int
    h: int
    edges: tuple[frozenset[int], ...]

    @classmethod
    def build(cls, n: int, h: int, edges) -> "UniformHypergraphInstance":
        seen = []
        for e in edges:
            s = frozenset(e)
            if len(s) != h or len(tuple(e)) != h:
                raise UniformityMismatch(f"edge {tuple(e)} is not an {h}-set")
            if any(not 0 <= v < n for v in s):
                raise ValueError(f"edge {tuple(e)} outside 0..{n - 1}")
            if s not in seen:
                seen.append(s)
        return cls(n, h, tuple(seen))


# --------------------------------------------------------------------------
# triangle -> any cyclic self-join-free binary query


def _binary_cyclic_check(q: ConjunctiveQuery):
    for a in q.body:
        if a.arity != 2:
            raise NonBinaryAtom(f"atom {a} has arity {a.arity}")
    if not q.is_self_join_free:
        raise ValueError(f"query {q} repeats a relation symbol")
    if gyo_acyclicity(build_hypergraph(q))[0]:
        raise NotCyclic(f"query {q} is acyclic")


def triangle_to_cyclic_db(g: Graph, q: ConjunctiveQuery) -> Database:
    """Database on which ``q`` holds iff ``g`` has a triangle.

    Along a chordless cycle of the query, three consecutive atoms read the
    symmetric edge relation and the rest of the cycle copies the value
    through equality; everything off the cycle is pinned to a dummy value.
    """
    _binary_cyclic_check(q)
    witness = find_hard_witness(build_hypergraph(q))
    cyc = witness.vertices
    L = len(cyc)
    at = {v: i for i, v in enumerate(cyc)}
    V = range(g.n)
    edges = g.symmetric_edges()
    eq = [(v, v) for v in V]

    data: dict[str, list] = {}
    for a in q.body:
        x, y = a.args
        on_x, on_y = x in at, y in at
        if on_x and on_y:
            if x == y:
                rows = eq
            else:
                i, j = at[x], at[y]
                if (i + 1) % L == j:
                    step = i
                elif (j + 1) % L == i:
                    step = j
                else:  # cannot happen for a chordless cycle
                    raise AssertionError(f"atom {a} is a chord of the cycle {cyc}")
                # the first three steps read E (symmetric, so orientation is free)
                rows = edges if step < 3 else eq
        elif on_x:
            rows = [(v, DUMMY) for v in V]
        elif on_y:
            rows = [(DUMMY, v) for v in V]
        else:
            rows = [(DUMMY, DUMMY)]
        data[a.relation] = rows

    domain = Domain(list(V) + [DUMMY])
    return Database.from_values(data, arities={a.relation: 2 for a in q.body}, domain=domain)


def triangle_via_query(g: Graph, q: ConjunctiveQuery) -> bool:
    return decide(q, triangle_to_cyclic_db(g, q))


# --------------------------------------------------------------------------
# hyperclique -> Loomis-Whitney


def hyperclique_to_lw_db(inst: UniformHypergraphInstance, k: int) -> Database:
    if k < 4:
        raise ValueError("Loomis-Whitney reductions need k >= 4")
    if inst.h != k - 1:
        raise UniformityMismatch(f"need a {k - 1}-uniform hypergraph, got {inst.h}-uniform")
    domain = Domain(range(inst.n))
    perms = frozenset(
        tuple(domain.id_of(v) for v in p) for e in inst.edges for p in itertools.permutations(sorted(e))
    )
    shared = Relation(k - 1, perms)  # one relation object behind every atom
    q = loomis_whitney_query(k)
    return Database({a.relation: shared for a in q.body}, domain)


def hyperclique_via_lw(inst: UniformHypergraphInstance, k: int) -> bool:
    return decide(loomis_whitney_query(k), hyperclique_to_lw_db(inst, k))


# --------------------------------------------------------------------------
# k-dominating set -> counting star answers


def kds_to_star_count(g: Graph, k: int, kprime: int) -> tuple[Database, bool]:
    """Star database whose answer count falls short of n^k' iff a dominating set exists.

    R holds (u_1..u_t, v) for every vector u of t = k'/k vertices and every
    vertex v that none of the u_i dominates.  An answer of the k-armed star is
    a choice of k' vertices leaving some v undominated.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if kprime < 1 or kprime % k:
        raise DivisibilityViolation(f"k'={kprime} is not a positive multiple of k={k}")
    t = kprime // k
    nb = g.neighbours()
    rows = []
    for u in itertools.product(range(g.n), repeat=t):
        covered = set(u)
        for x in u:
            covered |= nb[x]
        rows.extend((*u, v) for v in range(g.n) if v not in covered)
    domain = Domain(range(g.n))
    db = Database.from_values({"R": rows}, arities={"R": t + 1}, domain=domain)
    q = star_query(k, self_joins=True, width=t)
    count = count_answers(q, db, superlinear=True)
    return db, count < g.n ** kprime


# --------------------------------------------------------------------------
# 3SUM -> direct access under a sum order


def disjoint_pair(q: ConjunctiveQuery) -> tuple[str, str]:
    h = build_hypergraph(q)
    for x, y in itertools.combinations(q.body_variables(), 2):
        if not h.co_occur(x, y):
            return x, y
    raise NoDisjointPair(f"every pair of variables of {q} shares an atom")


def default_threesum_query() -> ConjunctiveQuery:
    return ConjunctiveQuery(("x", "z", "y"), [Atom("R1", ("x", "z")), Atom("R2", ("z", "y"))])


def threesum_db(a, b, q: ConjunctiveQuery) -> tuple[Database, WeightMap]:
    x, y = disjoint_pair(q)
    domain = Domain([0])
    data = {}
    for atom in q.body:
        if x in atom.variables:
            src, var = a, x
        elif y in atom.variables:
            src, var = b, y
        else:
            src, var = [0], None
        data[atom.relation] = [tuple(d if u == var else 0 for u in atom.args) for d in src]
    db = Database.from_values(data, arities=q.relation_arities(), domain=domain)
    weights = WeightMap({i: v for i, v in enumerate(domain.values())})
    return db, weights


def threesum_via_sum_order(a, b, c, q: ConjunctiveQuery | None = None) -> bool:
    """Is there a + b = c?  One weight-targeted binary search per c."""
    q = q if q is not None else default_threesum_query()
    if not q.is_join_query:
        raise ValueError("the 3SUM gadget needs a join query")
    if not q.is_self_join_free:
        raise ValueError(f"query {q} repeats a relation symbol")
    n = max(len(a) + len(b) + len(c), 1)  # total input size
    bound = n ** 4
    for v in itertools.chain(a, b, c):
        if not -bound <= v <= bound:
            raise InvalidInstance(f"value {v} outside [-{bound}, {bound}]")
    db, weights = threesum_db(a, b, q)
    try:
        idx = sum_order_index(q, weights, db)
    except NoCoveringAtom:
        idx = materialized_sum_order(q, weights, db)
    return any(find_weight(idx.access, idx.total, weights.tuple_weight, t) is not None for t in c)


# --------------------------------------------------------------------------
# clique embeddings


@dataclass
class EmbeddingCheck:
    valid: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.valid


def _connected(vars_: set, h) -> bool:
    vars_ = set(vars_)
    if not vars_:
        return False
    start = next(iter(vars_))
    seen, todo = {start}, [start]
    while todo:
        u = todo.pop()
        for w in h.neighbours(u) & vars_:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen == vars_


def validate_embedding(q: ConjunctiveQuery, psi: dict) -> EmbeddingCheck:
    h = build_hypergraph(q)
    problems = []
    for x, vs in psi.items():
        unknown = set(vs) - set(h.vertices)
        if unknown:
            problems.append(f"{x}: unknown variables {sorted(unknown)}")
        elif not _connected(set(vs), h):
            problems.append(f"connectivity: image of {x} is not connected")
    for xi, xj in itertools.combinations(psi, 2):
        si, sj = set(psi[xi]), set(psi[xj])
        if si & sj:
            continue
        if not any(e & si and e & sj for e in h.edges):
            problems.append(f"coverage: {xi} and {xj} neither overlap nor share an edge")
    return EmbeddingCheck(not problems, problems)


def five_cycle_embedding() -> tuple[ConjunctiveQuery, dict]:
    """The 5-cycle query with a 5-clique mapped onto windows of three variables."""
    q = cycle_query(5)
    vs = [f"v{i}" for i in range(1, 6)]
    psi = {f"x{i + 1}": {vs[i], vs[(i + 1) % 5], vs[(i + 2) % 5]} for i in range(5)}
    return q, psi


def clique_embedding_db(
    g: Graph, q: ConjunctiveQuery, psi: dict, ordered: bool = True
) -> tuple[Database, dict]:
    """Database and tuple weights whose tropical aggregate is the min-weight clique.

    A variable v takes as value a tuple of G-vertices, one for every clique
    vertex mapped onto v.  Each atom lists the assignments of its clique
    vertices that are pairwise adjacent; a shared clique vertex thus gets one
    consistent choice.  Each clique edge is charged to the lowest-index atom
    covering it.  With ``ordered`` the clique vertices pick increasing
    G-vertices, so every clique is produced once.  Unweighted graphs use
    unit weights.
    """
    check = validate_embedding(q, psi)
    if not check:
        raise InvalidEmbedding(check.problems)
    if not q.is_self_join_free:
        raise ValueError(f"query {q} repeats a relation symbol")
    xs = list(psi)
    inv = {v: tuple(i for i, x in enumerate(xs) if v in psi[x]) for v in q.body_variables()}
    touched = [sorted({i for v in a.variables for i in inv[v]}) for a in q.body]
    owner = {}
    for i, j in itertools.combinations(range(len(xs)), 2):
        owner[(i, j)] = next(k for k, t in enumerate(touched) if i in t and j in t)
    nb = g.neighbours()

    def wt(u, v):
        return 1 if g.weights is None else g.weight(u, v)

    def assignments(idx: list[int]):
        chosen: dict[int, int] = {}

        def rec(p):
            if p == len(idx):
                yield dict(chosen)
                return
            i = idx[p]
            for u in range(g.n):
                if ordered and p and u <= chosen[idx[p - 1]]:
                    continue
                if all(u in nb[chosen[j]] for j in idx[:p]):
                    chosen[i] = u
                    yield from rec(p + 1)
                    del chosen[i]

        yield from rec(0)

    domain = Domain()
    rels, weights = {}, {}
    for k, a in enumerate(q.body):
        mine = [pair for pair, o in owner.items() if o == k]
        rows = set()
        for asg in assignments(touched[k]):
            t = tuple(domain.intern(tuple(asg[i] for i in inv[u])) for u in a.args)
            rows.add(t)
            weights[(a.relation, t)] = sum(wt(asg[i], asg[j]) for i, j in mine)
        rels[a.relation] = Relation(a.arity, frozenset(rows))
    return Database(rels, domain), weights


def min_weight_clique_via_embedding(g: Graph, q: ConjunctiveQuery, psi: dict) -> float:
    db, weights = clique_embedding_db(g, q, psi)
    return tropical_aggregate(q.with_head(q.body_variables()), db, weights)


# --------------------------------------------------------------------------
# input files


def _lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("%")]


def load_graph(path) -> Graph:
    lines = _lines(path)
    if not lines:
        raise DataError(f"{path}: empty graph file")
    n = int(lines[0])
    edges, weights = [], []
    for ln in lines[1:]:
        parts = [int(p) for p in ln.split(",")]
        if len(parts) not in (2, 3):
            raise DataError(f"{path}: bad edge line {ln!r}")
        edges.append((parts[0], parts[1]))
        weights.append(parts[2] if len(parts) == 3 else None)
    if any(w is not None for w in weights):
        if any(w is None for w in weights):
            raise DataError(f"{path}: either every edge carries a weight or none does")
        return Graph.build(n, edges, weights)
    return Graph.build(n, edges)


def load_hypergraph(path) -> UniformHypergraphInstance:
    lines = _lines(path)
    if not lines:
        raise DataError(f"{path}: empty hypergraph file")
    h = int(lines[0])
    edges = [tuple(int(p) for p in ln.split(",")) for ln in lines[1:]]
    n = max((max(e) for e in edges), default=-1) + 1
    return UniformHypergraphInstance.build(n, h, edges)


def load_threesum(path) -> tuple[list[int], list[int], list[int]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    lines = (lines + ["", "", ""])[:3]
    a, b, c = ([int(p) for p in ln.split(",") if p.strip()] for ln in lines)
    return a, b, c


def load_embedding(path) -> dict:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return {x: set(vs) for x, vs in raw.items()}
