import itertools

import pytest

from fgcq.errors import InstanceTooLarge
from fgcq.oracles import (
    Graph,
    brute_3sum,
    brute_dominating_set,
    brute_hyperclique,
    brute_kclique,
    brute_min_weight_clique,
    brute_triangle,
    brute_zero_clique,
    count_cliques,
    sorted_merge_3sum,
)


def complete(n, weight=None):
    edges = list(itertools.combinations(range(n), 2))
    return Graph.build(n, edges, None if weight is None else [weight] * len(edges))


def test_examples():
    assert brute_3sum([0], [0], [0])
    assert brute_min_weight_clique(complete(4, 1), 3) == 3
    k3 = Graph.build(3, [(0, 1), (1, 2), (0, 2)], [1, -2, 1])
    assert brute_zero_clique(k3, 3)
    assert not brute_zero_clique(Graph.build(3, [(0, 1), (1, 2), (0, 2)], [1, 1, 1]), 3)


def test_no_clique_is_infinite():
    path = Graph.build(3, [(0, 1), (1, 2)], [1, 1])
    assert brute_min_weight_clique(path, 3) == float("inf")


def test_graph_normalises_edges():
    g = Graph.build(3, [(1, 0), (0, 1)])
    assert g.edges == frozenset({(0, 1)})
    with pytest.raises(ValueError):
        Graph.build(2, [(0, 0)])


def test_counts_and_domination():
    assert count_cliques(complete(6), 3) == 20
    assert brute_kclique(complete(5), 5) and not brute_kclique(complete(4), 5)
    star = Graph.build(5, [(0, i) for i in range(1, 5)])
    assert brute_dominating_set(star, 1)
    assert not brute_dominating_set(Graph.build(5, []), 2)
    assert brute_triangle(complete(3)) and not brute_triangle(star)
    assert brute_hyperclique(4, list(itertools.combinations(range(4), 3)), 4)


def test_merge_matches_pairs():
    import random

    rng = random.Random(0)
    for _ in range(200):
        a, b, c = ([rng.randint(-20, 20) for _ in range(rng.randint(0, 6))] for _ in range(3))
        assert sorted_merge_3sum(a, b, c) == brute_3sum(a, b, c)


def test_caps():
    with pytest.raises(InstanceTooLarge):
        brute_triangle(Graph.build(2001, []))
    with pytest.raises(InstanceTooLarge):
        brute_3sum(list(range(501)), [0], [0])
    with pytest.raises(InstanceTooLarge):
        brute_kclique(Graph.build(200, []), 6)
