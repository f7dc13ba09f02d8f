"""Round-trip each gadget on random instances and compare with the exhaustive solver."""

from __future__ import annotations

import argparse
import itertools
import random
import time

from fgcq.fastlinalg import BoolMatrix, bmm, sparse_bmm_via_star
from fgcq.generators import (
    random_graph,
    random_threesum,
    random_uniform_hypergraph,
    random_weighted_graph,
)
from fgcq import oracles
from fgcq.query import cycle_query
from fgcq.reductions import (
    UniformHypergraphInstance,
    five_cycle_embedding,
    hyperclique_via_lw,
    kds_to_star_count,
    min_weight_clique_via_embedding,
    threesum_via_sum_order,
    triangle_via_query,
)


def triangle(rng):
    n = rng.randint(3, 12)
    g = oracles.Graph.build(n, random_graph(n, rng.uniform(0.1, 0.5), rng))
    return triangle_via_query(g, cycle_query(5)), oracles.brute_triangle(g)


def hyperclique(rng):
    edges = random_uniform_hypergraph(8, 3, rng.uniform(0.3, 0.8), rng)
    return hyperclique_via_lw(UniformHypergraphInstance.build(8, 3, edges), 4), oracles.brute_hyperclique(8, edges, 4)


def kds(rng):
    n = rng.randint(1, 7)
    g = oracles.Graph.build(n, random_graph(n, 0.3, rng))
    return kds_to_star_count(g, 2, 4)[1], oracles.brute_dominating_set(g, 4)


def sparse_bmm(rng):
    n = rng.randint(1, 25)
    a, b = ([(i, j) for i, j in itertools.product(range(n), repeat=2) if rng.random() < 0.1] for _ in range(2))
    ref = bmm(BoolMatrix.from_coords(n, a), BoolMatrix.from_coords(n, b)).coords()
    return sparse_bmm_via_star(a, b), sorted(ref)


def threesum(rng):
    k = rng.randint(1, 40)
    a, b, c = random_threesum(k, rng, span=min(200, (3 * k) ** 4))
    return threesum_via_sum_order(a, b, c), oracles.brute_3sum(a, b, c)


def clique_embedding(rng):
    q, psi = five_cycle_embedding()
    edges, w = random_weighted_graph(8, rng.uniform(0.5, 0.9), rng)
    g = oracles.Graph.build(8, edges, w)
    return min_weight_clique_via_embedding(g, q, psi), oracles.brute_min_weight_clique(g, 5)


DEMOS = {
    "triangle": triangle,
    "hyperclique": hyperclique,
    "kds": kds,
    "bmm": sparse_bmm,
    "threesum": threesum,
    "clique-embedding": clique_embedding,
}


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    for name, demo in DEMOS.items():
        rng = random.Random(args.seed)
        t0 = time.perf_counter()
        agree = sum(got == want for got, want in (demo(rng) for _ in range(args.trials)))
        print(f"{name:18s} {agree}/{args.trials} agree with the oracle  ({time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
