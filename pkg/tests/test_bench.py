import random

import pytest
from hypothesis import given, strategies as st

from fgcq.bench import BenchConfig, Curve, fit_slope, gap_trace, run_suite, stable_max_gap, write_curves
from fgcq.generators import bipartite_regular_graph, enumeration_instance, scaled_acyclic_instance
from fgcq.oracles import Graph, brute_triangle


@given(st.floats(0.2, 3.0), st.floats(1e-6, 10.0))
def test_fit_slope_recovers_power_law(k, c):
    xs = [10**3, 3 * 10**3, 10**4, 3 * 10**4, 10**5]
    assert fit_slope(xs, [c * x**k for x in xs]) == pytest.approx(k, abs=1e-9)


def test_fit_slope_drops_small_sizes():
    xs = [1, 2, 4, 8, 16]
    ys = [100, 100, 4, 8, 16]  # warm-up noise at the two smallest sizes
    assert fit_slope(xs, ys, drop=2) == pytest.approx(1.0)


def test_gap_trace_counts():
    assert len(gap_trace(iter(range(10)), capacity=4)) == 9
    assert len(gap_trace(iter([]))) == 0
    assert stable_max_gap(lambda: iter(range(100)), 3) >= 0


def test_instances_have_requested_size():
    rng = random.Random(0)
    q, db = scaled_acyclic_instance(4000, rng)
    assert db.size == 4000 and len(q.body) == 4
    q, db = enumeration_instance(2000, rng)
    assert db.size == 2000


def test_bipartite_graphs_are_triangle_free():
    edges = bipartite_regular_graph(300, 6, random.Random(1))
    assert not brute_triangle(Graph.build(100, edges))


def test_run_suite_and_csv(tmp_path):
    curves = run_suite("lex-access", [200, 400], BenchConfig(repeats=1, accesses=10))
    write_curves(curves + [Curve("empty")], tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "series,m,seconds" and len(lines) == 3
