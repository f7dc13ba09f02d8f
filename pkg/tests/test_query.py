import pytest
from hypothesis import given, strategies as st

from fgcq.errors import QueryParseError
from fgcq.generators import random_query
from fgcq.query import (
    Atom,
    ConjunctiveQuery,
    build_hypergraph,
    cycle_query,
    loomis_whitney_query,
    parse_query,
    render_query,
    star_query,
    triangle_query,
)
import random


def test_parse_boolean_two_atoms():
    q = parse_query("q() :- R(x,y), S(y,z).")
    assert q.is_boolean and len(q.body) == 2
    assert q.body[0] == Atom("R", ("x", "y"))


def test_parse_star_with_projection():
    q = parse_query("q(x1,x2) :- R1(x1,z), R2(x2,z).")
    assert q == star_query(2, self_joins=False)
    assert q.head == ("x1", "x2") and not q.is_join_query


def test_head_variable_must_occur_in_body():
    with pytest.raises(QueryParseError):
        parse_query("q(x) :- R(y).")


def test_empty_body_rejected():
    with pytest.raises(QueryParseError):
        parse_query("q() :- .")


def test_syntax_error_reports_position():
    with pytest.raises(QueryParseError) as err:
        parse_query("q(x) :-\n  R(x,, y).")
    assert err.value.line == 2 and err.value.column > 0


def test_comments_and_whitespace():
    q = parse_query("% a comment\nq ( x ) :- % trailing\n R ( x , y ) .")
    assert q.head == ("x",) and q.body == (Atom("R", ("x", "y")),)


def test_flags():
    q = parse_query("q(x,y) :- R(x,y), R(y,x).")
    assert q.is_join_query and not q.is_self_join_free and not q.is_boolean


def test_triangle_hypergraph():
    h = build_hypergraph(triangle_query())
    assert h.vertices == {"x", "y", "z"}
    assert set(h.edges) == {frozenset("xy"), frozenset("yz"), frozenset("zx")}


def test_repeat_collapses():
    h = build_hypergraph(parse_query("q() :- R(x,x)."))
    assert h.vertices == {"x"} and set(h.edges) == {frozenset("x")}


def test_loomis_whitney_four():
    h = build_hypergraph(loomis_whitney_query(4))
    assert len(h.vertices) == 4
    assert len(h.edges) == 4 and all(len(e) == 3 for e in h.edges)


def test_cycle_query_shape():
    q = cycle_query(5)
    assert len(q.body) == 5 and q.is_boolean and q.is_self_join_free


def test_star_width():
    q = star_query(2, width=2)
    assert q.body[0].arity == 3 and len(q.head) == 4


@given(st.integers(0, 10**6))
def test_render_round_trip(seed):
    q = random_query(random.Random(seed), self_joins=seed % 2 == 0)
    assert parse_query(render_query(q)) == q


@given(st.integers(0, 10**6))
def test_hypergraph_invariants(seed):
    rng = random.Random(seed)
    q = random_query(rng)
    h = build_hypergraph(q)
    body = list(q.body)
    rng.shuffle(body)
    h2 = build_hypergraph(ConjunctiveQuery(q.head, body))
    assert h == h2
    assert len(h.edges) <= len(q.body)
    assert h.vertices == {v for a in q.body for v in a.args}
