import itertools
import json
import random

import pytest

from fgcq.engine import brute_force_answers, count_answers
from fgcq.errors import (
    DivisibilityViolation,
    InvalidEmbedding,
    InvalidInstance,
    NoDisjointPair,
    NonBinaryAtom,
    NotCyclic,
    UniformityMismatch,
)
from fgcq.fastlinalg import BoolMatrix, bmm, sparse_bmm_via_star
from fgcq.generators import (
    random_graph,
    random_threesum,
    random_uniform_hypergraph,
    random_weighted_graph,
)
from fgcq.oracles import (
    Graph,
    brute_dominating_set,
    brute_hyperclique,
    brute_min_weight_clique,
    brute_triangle,
    count_cliques,
    sorted_merge_3sum,
)
from fgcq.query import cycle_query, parse_query, star_query, triangle_query
from fgcq.reductions import (
    DUMMY,
    UniformHypergraphInstance,
    clique_embedding_db,
    default_threesum_query,
    disjoint_pair,
    five_cycle_embedding,
    hyperclique_via_lw,
    kds_to_star_count,
    load_embedding,
    load_graph,
    load_hypergraph,
    load_threesum,
    min_weight_clique_via_embedding,
    threesum_db,
    threesum_via_sum_order,
    triangle_to_cyclic_db,
    triangle_via_query,
    validate_embedding,
)


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.build(10, outer + spokes + inner)


# ---------------------------------------------------------------- triangle


def test_triangle_examples():
    k3 = Graph.build(3, [(0, 1), (1, 2), (0, 2)])
    assert triangle_via_query(k3, triangle_query())
    assert not brute_triangle(petersen())
    assert not triangle_via_query(petersen(), cycle_query(5))


def test_triangle_gadget_errors():
    g = Graph.build(3, [(0, 1)])
    with pytest.raises(NotCyclic):
        triangle_to_cyclic_db(g, parse_query("q() :- R(x,y), S(y,z)."))
    with pytest.raises(NonBinaryAtom):
        triangle_to_cyclic_db(g, parse_query("q() :- R(x,y,z), S(x,y)."))


@pytest.mark.parametrize("query", [
    cycle_query(4),
    cycle_query(5),
    parse_query("q() :- A(a,b), B(b,c), C(c,d), D(d,a), E(d,u), F(u,w), G(w,w)."),
    parse_query("q() :- A(a,b), B(c,b), C(c,a), D(b,a)."),
])
def test_triangle_gadget_random(query):
    rng = random.Random(10)
    for _ in range(100):
        n = rng.randint(3, 9)
        g = Graph.build(n, random_graph(n, rng.uniform(0.1, 0.6), rng))
        assert triangle_via_query(g, query) == brute_triangle(g)


def test_triangle_gadget_linear_size():
    q = cycle_query(5)
    rng = random.Random(11)
    for n in (10, 40, 160):
        g = Graph.build(n, random_graph(n, 0.1, rng))
        db = triangle_to_cyclic_db(g, q)
        assert db.size <= len(q.body) * (2 * len(g.edges) + n)
        assert DUMMY in db.domain


# ---------------------------------------------------------------- hyperclique


def test_hyperclique_examples():
    full = UniformHypergraphInstance.build(4, 3, itertools.combinations(range(4), 3))
    assert hyperclique_via_lw(full, 4)
    missing = UniformHypergraphInstance.build(4, 3, list(itertools.combinations(range(4), 3))[1:])
    assert not hyperclique_via_lw(missing, 4)
    with pytest.raises(UniformityMismatch):
        hyperclique_via_lw(UniformHypergraphInstance.build(4, 2, [(0, 1)]), 4)
    with pytest.raises(UniformityMismatch):
        UniformHypergraphInstance.build(4, 3, [(0, 1)])


def test_hyperclique_random():
    rng = random.Random(12)
    for _ in range(100):
        n = 10
        edges = random_uniform_hypergraph(n, 3, rng.uniform(0.3, 0.7), rng)
        inst = UniformHypergraphInstance.build(n, 3, edges)
        assert hyperclique_via_lw(inst, 4) == brute_hyperclique(n, edges, 4)


def test_hyperclique_k5():
    rng = random.Random(13)
    for _ in range(20):
        edges = random_uniform_hypergraph(7, 4, 0.8, rng)
        inst = UniformHypergraphInstance.build(7, 4, edges)
        assert hyperclique_via_lw(inst, 5) == brute_hyperclique(7, edges, 5)


# ---------------------------------------------------------------- dominating set


def test_kds_examples():
    star = Graph.build(5, [(0, i) for i in range(1, 5)])
    assert kds_to_star_count(star, 2, 2)[1]
    assert not kds_to_star_count(Graph.build(5, []), 2, 2)[1]
    with pytest.raises(DivisibilityViolation):
        kds_to_star_count(star, 2, 3)


@pytest.mark.parametrize("k,kprime,nmax", [(2, 2, 10), (2, 4, 7), (3, 3, 7)])
def test_kds_random(k, kprime, nmax):
    rng = random.Random(14 + kprime)
    for _ in range(100 if k == 2 else 30):
        n = rng.randint(1, nmax)
        g = Graph.build(n, random_graph(n, rng.uniform(0.0, 0.5), rng))
        db, decision = kds_to_star_count(g, k, kprime)
        assert decision == brute_dominating_set(g, kprime)
        assert db.size <= n ** (kprime // k + 1)


def test_kds_count_matches_brute():
    rng = random.Random(15)
    for _ in range(30):
        n = rng.randint(1, 6)
        g = Graph.build(n, random_graph(n, 0.3, rng))
        db, _ = kds_to_star_count(g, 2, 2)
        q = star_query(2, self_joins=True)
        assert count_answers(q, db, superlinear=True) == len(brute_force_answers(q, db))


# ---------------------------------------------------------------- BMM


def test_bmm_via_star_random():
    rng = random.Random(16)
    for _ in range(100):
        n = rng.randint(1, 30)
        a = [(i, j) for i in range(n) for j in range(n) if rng.random() < 0.1]
        b = [(i, j) for i in range(n) for j in range(n) if rng.random() < 0.1]
        ref = bmm(BoolMatrix.from_coords(n, a), BoolMatrix.from_coords(n, b))
        assert sparse_bmm_via_star(a, b) == sorted(ref.coords())


# ---------------------------------------------------------------- 3SUM


def test_threesum_examples():
    assert threesum_via_sum_order([1, 2], [3], [5])
    assert not threesum_via_sum_order([1], [1], [3])
    with pytest.raises(NoDisjointPair):
        threesum_via_sum_order([1], [2], [3], parse_query("q(x,y) :- R(x,y)."))
    with pytest.raises(InvalidInstance):
        threesum_via_sum_order([10**6], [0], [0])


def test_threesum_pins_other_variables():
    q = parse_query("q(x,u,y,w) :- R(x,u), S(u,w), T(w,y), U(w).")
    x, y = disjoint_pair(q)
    db, _ = threesum_db([3, 4], [5], q)
    for a in q.body:
        for row in db.relation(a.relation, a.arity):
            t = db.extern(row)
            assert all(v == 0 for u, v in zip(a.args, t) if u not in (x, y))
            assert set(t) <= {0, 3, 4, 5}


@pytest.mark.parametrize("query", [
    None,
    parse_query("q(x,y) :- R(x), S(y)."),
    parse_query("q(x,z,y) :- R(x,z), S(z,y), T(z)."),
])
def test_threesum_random(query):
    rng = random.Random(17)
    for _ in range(100):
        k = rng.randint(1, 50)
        a, b, c = random_threesum(k, rng, span=min(300, (3 * k) ** 4))
        assert threesum_via_sum_order(a, b, c, query) == sorted_merge_3sum(a, b, c)


def test_default_threesum_query_is_disjoint():
    q = default_threesum_query()
    assert not any({"x", "y"} <= set(a.args) for a in q.body)


# ---------------------------------------------------------------- clique embedding


def test_five_cycle_embedding_valid():
    q, psi = five_cycle_embedding()
    assert validate_embedding(q, psi)


def test_invalid_embeddings_reported():
    q = cycle_query(6)
    bad_pair = {"x1": {"v1"}, "x2": {"v4"}}
    check = validate_embedding(q, bad_pair)
    assert not check and "x1" in check.problems[0] and "x2" in check.problems[0]
    disconnected = {"x1": {"v1", "v3"}, "x2": {"v2"}}
    check = validate_embedding(q, disconnected)
    assert not check and any("connectivity" in p for p in check.problems)
    with pytest.raises(InvalidEmbedding):
        clique_embedding_db(Graph.build(3, []), q, bad_pair)


def test_k5_unit_weights():
    q, psi = five_cycle_embedding()
    k5 = Graph.build(5, list(itertools.combinations(range(5), 2)))
    assert min_weight_clique_via_embedding(k5, q, psi) == 10


def test_triangle_free_is_infinite():
    q = cycle_query(3)
    psi = {f"x{i}": {f"v{i}"} for i in (1, 2, 3)}
    assert min_weight_clique_via_embedding(petersen(), q, psi) == float("inf")


def test_embedding_random_weighted():
    q, psi = five_cycle_embedding()
    rng = random.Random(18)
    for _ in range(100):
        edges, w = random_weighted_graph(9, rng.uniform(0.5, 0.9), rng)
        g = Graph.build(9, edges, w)
        assert min_weight_clique_via_embedding(g, q, psi) == brute_min_weight_clique(g, 5)


def test_embedding_counts_cliques():
    q, psi = five_cycle_embedding()
    rng = random.Random(19)
    for _ in range(20):
        g = Graph.build(8, random_graph(8, 0.8, rng))
        db, _ = clique_embedding_db(g, q, psi)
        full = q.with_head(q.body_variables())
        assert len(brute_force_answers(full, db)) == count_cliques(g, 5)


# ---------------------------------------------------------------- loaders


def test_loaders(tmp_path):
    (tmp_path / "g.csv").write_text("4\n0,1\n1,2\n")
    assert load_graph(tmp_path / "g.csv").edges == {(0, 1), (1, 2)}
    (tmp_path / "w.csv").write_text("3\n0,1,5\n1,2,-1\n")
    assert load_graph(tmp_path / "w.csv").weight(2, 1) == -1
    (tmp_path / "h.txt").write_text("3\n0,1,2\n1,2,3\n")
    assert load_hypergraph(tmp_path / "h.txt").edges[1] == frozenset({1, 2, 3})
    (tmp_path / "s.txt").write_text("1,2\n3\n5\n")
    assert load_threesum(tmp_path / "s.txt") == ([1, 2], [3], [5])
    (tmp_path / "e.json").write_text(json.dumps({"x1": ["v1", "v2"]}))
    assert load_embedding(tmp_path / "e.json") == {"x1": {"v1", "v2"}}
