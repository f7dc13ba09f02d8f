"""Random queries, databases and graphs for tests and benchmarks."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .query import Atom, ConjunctiveQuery
from .storage import Database, Domain, Relation


@dataclass
class QueryShape:
    max_atoms: int = 5
    max_arity: int = 3
    max_vars: int = 6


def random_query(rng: random.Random, shape: QueryShape | None = None, head: str = "random",
                 self_joins: bool = False) -> ConjunctiveQuery:
    """Arbitrary (possibly cyclic) query; ``head`` is "random", "all" or "none"."""
    shape = shape or QueryShape()
    nvars = rng.randint(1, shape.max_vars)
    vs = [f"v{i}" for i in range(nvars)]
    k = rng.randint(1, shape.max_atoms)
    body = []
    for i in range(k):
        arity = rng.randint(1, shape.max_arity)
        args = tuple(rng.choice(vs) for _ in range(arity))
        sym = f"R{rng.randint(0, i)}" if self_joins else f"R{i}"
        if self_joins and any(a.relation == sym and a.arity != arity for a in body):
            sym = f"R{i}"
        body.append(Atom(sym, args))
    return ConjunctiveQuery(_pick_head(rng, body, head), body)


def random_acyclic_query(rng: random.Random, shape: QueryShape | None = None,
                         head: str = "random") -> ConjunctiveQuery:
    """Grow a join tree: each new atom reuses part of an earlier atom's scope."""
    shape = shape or QueryShape()
    k = rng.randint(1, shape.max_atoms)
    fresh = iter(f"v{i}" for i in range(100))
    body: list[Atom] = []
    for i in range(k):
        arity = rng.randint(1, shape.max_arity)
        if body:
            parent = rng.choice(body).distinct_args()
            shared = rng.sample(parent, rng.randint(0, min(arity, len(parent))))
        else:
            shared = []
        args = list(shared) + [next(fresh) for _ in range(arity - len(shared))]
        rng.shuffle(args)
        body.append(Atom(f"R{i}", tuple(args)))
    return ConjunctiveQuery(_pick_head(rng, body, head), body)


def _pick_head(rng, body, head):
    vs = sorted({v for a in body for v in a.args})
    if head == "all":
        return tuple(vs)
    if head == "none":
        return ()
    chosen = [v for v in vs if rng.random() < 0.5]
    rng.shuffle(chosen)
    return tuple(chosen)


def random_database(q: ConjunctiveQuery, rng: random.Random, domain_size: int = 8,
                    max_tuples: int = 200) -> Database:
    """Uniform random relations for the symbols of ``q`` with about ``max_tuples`` total."""
    arities = q.relation_arities()
    per = max(1, max_tuples // max(1, len(arities)))
    domain = Domain(range(domain_size))
    rels = {}
    for sym, ar in arities.items():
        n = rng.randint(0, min(per, domain_size ** ar))
        rows = {tuple(rng.randrange(domain_size) for _ in range(ar)) for _ in range(n)}
        rels[sym] = Relation(ar, frozenset(rows))
    return Database(rels, domain)


def path_query(k: int, boolean: bool = True) -> ConjunctiveQuery:
    xs = [f"x{i}" for i in range(k + 1)]
    body = [Atom(f"R{i + 1}", (xs[i], xs[i + 1])) for i in range(k)]
    return ConjunctiveQuery(() if boolean else tuple(xs), body)


def scaled_acyclic_instance(m: int, rng: random.Random, atoms: int = 4) -> tuple[ConjunctiveQuery, Database]:
    """Boolean path query with ``atoms`` binary relations, ``m`` tuples in total.

    The domain has m/atoms values so the join stays selective.
    """
    q = path_query(atoms)
    per = m // atoms
    dom = max(2, per)
    domain = Domain(range(dom))
    ids = [domain.id_of(v) for v in range(dom)]  # share the interned id objects
    rels = {}
    for a in q.body:
        rows = set()
        while len(rows) < per:
            rows.add((ids[rng.randrange(dom)], ids[rng.randrange(dom)]))
        rels[a.relation] = Relation(2, frozenset(rows))
    return q, Database(rels, domain)


def enumeration_instance(m: int, rng: random.Random) -> tuple[ConjunctiveQuery, Database]:
    """Free-connex q(x,y) :- R(x,y), S(y,z) with m tuples split evenly."""
    q = ConjunctiveQuery(("x", "y"), [Atom("R", ("x", "y")), Atom("S", ("y", "z"))])
    half = m // 2
    dom = max(2, half // 4)
    domain = Domain(range(dom))
    ids = [domain.id_of(v) for v in range(dom)]
    r, s = set(), set()
    while len(r) < half:
        r.add((ids[rng.randrange(dom)], ids[rng.randrange(dom)]))
    while len(s) < half:
        s.add((ids[rng.randrange(dom)], ids[rng.randrange(dom)]))
    return q, Database({"R": Relation(2, frozenset(r)), "S": Relation(2, frozenset(s))}, domain)


# --------------------------------------------------------------------------
# graphs


def random_graph(n: int, p: float, rng: random.Random) -> list[tuple[int, int]]:
    return [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]


def bipartite_regular_graph(m: int, degree: int, rng: random.Random) -> list[tuple[int, int]]:
    """Triangle-free near-regular graph with about ``m`` edges.

    Two sides of m/degree vertices joined by ``degree`` random perfect
    matchings (duplicates dropped).
    """
    side = max(1, m // degree)
    edges = set()
    right = list(range(side))
    for _ in range(degree):
        rng.shuffle(right)
        edges.update((u, side + right[u]) for u in range(side))
    return sorted(edges)


def random_uniform_hypergraph(n: int, h: int, p: float, rng: random.Random) -> list[tuple[int, ...]]:
    return [e for e in itertools.combinations(range(n), h) if rng.random() < p]


def random_weighted_graph(n: int, p: float, rng: random.Random, low: int = 1, high: int = 20):
    edges = random_graph(n, p, rng)
    return edges, [rng.randint(low, high) for _ in edges]


def random_threesum(n: int, rng: random.Random, span: int = 100):
    """Three lists of ``n`` integers in [-span, span]."""
    return tuple([rng.randint(-span, span) for _ in range(n)] for _ in range(3))
