import itertools
import random

import pytest
from hypothesis import given, strategies as st

from fgcq import access
from fgcq.access import (
    build_lex_index,
    domain_rank,
    find_weight,
    lex_access,
    materialized_lex_index,
    materialized_sum_order,
    sum_order_index,
)
from fgcq.engine import brute_force_answers
from fgcq.errors import (
    DisruptiveTrioPresent,
    NoCoveringAtom,
    NotAcyclic,
    OrderMismatch,
    OutOfRange,
    PrefixMismatch,
)
from fgcq.generators import random_acyclic_query, random_database
from fgcq.query import parse_query, star_query, triangle_query
from fgcq.storage import Database, WeightMap
from fgcq.structure import find_disruptive_trios


def example_db():
    return Database.from_values({"R": [(0, 0), (0, 1), (1, 0), (1, 1)]})


def sorted_oracle(q, db, order, rank=None):
    rank = rank or list(range(len(db.domain)))
    pos = [q.head.index(v) for v in order]
    return sorted(brute_force_answers(q, db), key=lambda t: tuple(rank[t[p]] for p in pos))


def trio_free_order(q, rng):
    o = list(q.head)
    for _ in range(200):
        rng.shuffle(o)
        if not find_disruptive_trios(q, o):
            return list(o)
    return None


def random_instance(seed):
    rng = random.Random(seed)
    q = random_acyclic_query(rng, head="all")
    db = random_database(q, rng, rng.randint(1, 6), rng.randint(0, 80))
    return rng, q, db


# ---------------------------------------------------------------- examples


def test_two_by_two_orders():
    q = parse_query("q(x,y) :- R(x,y).")
    db = example_db()
    idx = build_lex_index(q, ["x", "y"], db)
    assert idx.total == 4
    assert db.extern(lex_access(idx, 2)) == (0, 1)
    idx = build_lex_index(q, ["y", "x"], db)
    assert db.extern(lex_access(idx, 2)) == (1, 0)
    with pytest.raises(OutOfRange):
        lex_access(idx, 5)
    with pytest.raises(OutOfRange):
        lex_access(idx, 0)


def test_trio_refused():
    q = star_query(2, self_joins=False, center_free=True)
    db = Database.from_values({"R1": [(1, 5)], "R2": [(2, 5)]})
    with pytest.raises(DisruptiveTrioPresent) as err:
        build_lex_index(q, ["x1", "x2", "z"], db)
    assert tuple(err.value.trio) == ("x1", "x2", "z")
    assert build_lex_index(q, ["z", "x1", "x2"], db).total == 1


def test_cyclic_and_bad_order_refused():
    with pytest.raises(NotAcyclic):
        build_lex_index(triangle_query(boolean=False), ["x", "y", "z"], Database())
    with pytest.raises(OrderMismatch):
        build_lex_index(parse_query("q(x,y) :- R(x,y)."), ["x"], example_db())


def test_empty_db():
    q = parse_query("q(x,y) :- R(x,y), S(y,z).".replace("q(x,y)", "q(x,y,z)"))
    db = Database.from_values({}, arities={"R": 2, "S": 2})
    assert build_lex_index(q, ["x", "y", "z"], db).total == 0


def test_prefix_examples():
    q = parse_query("q(x,y) :- R(x,y).")
    db = example_db()
    idx = build_lex_index(q, ["x", "y"], db)
    assert access.test_prefix(idx, [db.domain.id_of(0)])
    assert not access.test_prefix(idx, [7])
    assert access.test_prefix(idx, [])
    with pytest.raises(PrefixMismatch):
        access.test_prefix(idx, [0, 0, 0])


# ---------------------------------------------------------------- properties


@given(st.integers(0, 10**6))
def test_lex_sweep_matches_sorted_oracle(seed):
    rng, q, db = random_instance(seed)
    order = trio_free_order(q, rng)
    if order is None:
        return
    # build raises AssertionError if some context plus variable has no covering node
    idx = build_lex_index(q, order, db)
    expected = sorted_oracle(q, db, order)
    assert idx.total == len(expected)
    assert [lex_access(idx, i) for i in range(1, idx.total + 1)] == expected
    with pytest.raises(OutOfRange):
        lex_access(idx, idx.total + 1)
    for layer in idx.layers:
        for cands, cum in layer.table.values():
            assert all(a < b for a, b in zip(cum, cum[1:])) and cum[0] > 0


@given(st.integers(0, 10**6))
def test_every_trio_free_order_is_covered(seed):
    """Each variable's context plus itself sits inside one join-tree node."""
    rng, q, db = random_instance(seed)
    for order in itertools.islice(itertools.permutations(q.head), 60):
        if find_disruptive_trios(q, order):
            continue
        build_lex_index(q, order, db)


@given(st.integers(0, 10**6))
def test_value_domain_order(seed):
    rng, q, db = random_instance(seed)
    order = trio_free_order(q, rng)
    if order is None:
        return
    rank = domain_rank(db, "value")
    idx = build_lex_index(q, order, db, domain_order="value")
    expected = sorted_oracle(q, db, order, rank)
    assert [lex_access(idx, i) for i in range(1, idx.total + 1)] == expected


@given(st.integers(0, 10**6))
def test_prefix_testing_matches_projection(seed):
    rng, q, db = random_instance(seed)
    order = trio_free_order(q, rng)
    if order is None:
        return
    idx = build_lex_index(q, order, db)
    answers = brute_force_answers(q, db)
    pos = [q.head.index(v) for v in order]
    for k in range(1, len(order) + 1):
        present = {tuple(t[p] for p in pos[:k]) for t in answers}
        probes = list(present)[:5] + [
            tuple(rng.randrange(len(db.domain) + 1) for _ in range(k)) for _ in range(5)
        ]
        for pre in probes:
            assert access.test_prefix(idx, pre) == (pre in present)


@given(st.integers(0, 10**6))
def test_materialized_index_agrees(seed):
    rng, q, db = random_instance(seed)
    order = list(q.head)
    rng.shuffle(order)
    m = materialized_lex_index(q, order, db)
    assert m.answers == sorted_oracle(q, db, order)


# ---------------------------------------------------------------- sum orders


def test_sum_order_example():
    q = parse_query("q(x,y) :- R(x,y).")
    db = Database.from_values({"R": [(1, 1), (1, 2), (2, 2)]})
    w = WeightMap({i: v for i, v in enumerate(db.domain.values())})
    idx = sum_order_index(q, w, db)
    assert [db.extern(idx.access(i)) for i in (1, 2, 3)] == [(1, 1), (1, 2), (2, 2)]
    assert idx.weights == [2, 3, 4]
    with pytest.raises(OutOfRange):
        idx.access(4)


def test_sum_order_ties_are_lexicographic():
    q = parse_query("q(x,y) :- R(x,y).")
    db = example_db()
    w = WeightMap({i: 0 for i in range(len(db.domain))})
    idx = sum_order_index(q, w, db)
    assert idx.answers == sorted(idx.answers)


def test_sum_order_needs_covering_atom():
    q = parse_query("q(x,y,z) :- R(x,y), S(y,z).")
    with pytest.raises(NoCoveringAtom):
        sum_order_index(q, WeightMap(), Database())


@given(st.integers(0, 10**6))
def test_sum_order_matches_oracle(seed):
    rng = random.Random(seed)
    q = parse_query("q(x,y,z) :- R(x,y,z), S(y,z), T(x).")
    db = random_database(q, rng, 6, 150)
    w = WeightMap({i: rng.randint(-10, 10) for i in range(len(db.domain))})
    idx = sum_order_index(q, w, db)
    expected = sorted(brute_force_answers(q, db), key=lambda t: (w.tuple_weight(t), t))
    assert idx.answers == expected
    assert idx.weights == sorted(idx.weights)
    assert materialized_sum_order(q, w, db).answers == expected
    for target in range(-30, 31, 7):
        p = find_weight(idx.access, idx.total, w.tuple_weight, target)
        assert (p is not None) == any(w.tuple_weight(t) == target for t in expected)
