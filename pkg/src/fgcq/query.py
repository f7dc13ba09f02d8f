"""Conjunctive queries, their hypergraphs, and the textual rule format.

A query is written as a single Datalog-style rule::

    q(x1, x2) :- R1(x1, z), R2(x2, z).   % comments run to end of line

Variables are plain strings; identity is by name.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property

from .errors import QueryParseError

Variable = str


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Variable, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise ValueError(f"atom {self.relation} has no arguments")

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def variables(self) -> frozenset[Variable]:
        return frozenset(self.args)

    def distinct_args(self) -> tuple[Variable, ...]:
        """Arguments with repeats removed, first occurrence order."""
        return tuple(dict.fromkeys(self.args))

    def __str__(self):
        return f"{self.relation}({','.join(self.args)})"


@dataclass(frozen=True)
class ConjunctiveQuery:
    head: tuple[Variable, ...]
    body: tuple[Atom, ...]
    name: str = field(default="q", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "body", tuple(self.body))
        if not self.body:
            raise QueryParseError("query body is empty")
        missing = [v for v in self.head if v not in self.variables]
        if missing:
            raise QueryParseError(f"head variable(s) {', '.join(missing)} not in body")

    @cached_property
    def variables(self) -> frozenset[Variable]:
        return frozenset(v for a in self.body for v in a.args)

    def body_variables(self) -> tuple[Variable, ...]:
        """Body variables in order of first appearance."""
        return tuple(dict.fromkeys(v for a in self.body for v in a.args))

    @property
    def free(self) -> frozenset[Variable]:
        return frozenset(self.head)

    @property
    def is_join_query(self) -> bool:
        return self.free == self.variables

    @property
    def is_boolean(self) -> bool:
        return not self.head

    @property
    def is_self_join_free(self) -> bool:
        symbols = [a.relation for a in self.body]
        return len(symbols) == len(set(symbols))

    def relation_arities(self) -> dict[str, int]:
        arities: dict[str, int] = {}
        for a in self.body:
            if arities.setdefault(a.relation, a.arity) != a.arity:
                raise QueryParseError(
                    f"relation {a.relation} used with arities {arities[a.relation]} and {a.arity}"
                )
        return arities

    def with_head(self, head) -> "ConjunctiveQuery":
        return ConjunctiveQuery(tuple(head), self.body, self.name)

    def __str__(self):
        return render_query(self)


@dataclass(frozen=True)
class Hypergraph:
    vertices: frozenset[Variable]
    edges: frozenset[frozenset[Variable]]

    @classmethod
    def from_edges(cls, edges, vertices=None) -> "Hypergraph":
        es = frozenset(frozenset(e) for e in edges)
        vs = frozenset(vertices) if vertices is not None else frozenset().union(*es)
        for e in es:
            if not e <= vs:
                raise ValueError(f"edge {set(e)} not contained in the vertex set")
        return cls(vs, es)

    def sorted_edges(self) -> list[frozenset[Variable]]:
        return sorted(self.edges, key=lambda e: (sorted(e), len(e)))

    def maximal_edges(self) -> list[frozenset[Variable]]:
        return [e for e in self.sorted_edges() if not any(e < f for f in self.edges)]

    def add_edge(self, edge) -> "Hypergraph":
        edge = frozenset(edge)
        return Hypergraph(self.vertices | edge, self.edges | {edge})

    def induced(self, subset) -> "Hypergraph":
        """Induced hypergraph: every edge intersected with ``subset``, empties dropped."""
        s = frozenset(subset)
        return Hypergraph(s, frozenset(e & s for e in self.edges if e & s))

    def co_occur(self, u: Variable, v: Variable) -> bool:
        return any(u in e and v in e for e in self.edges)

    def neighbours(self, v: Variable) -> set[Variable]:
        out: set[Variable] = set()
        for e in self.edges:
            if v in e:
                out |= e
        out.discard(v)
        return out


def build_hypergraph(q: ConjunctiveQuery) -> Hypergraph:
    return Hypergraph(q.variables, frozenset(a.variables for a in q.body))


# --------------------------------------------------------------------------
# text format

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>%[^\n]*)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<turnstile>:-)|(?P<punct>[(),.])"
)


def _tokenize(text: str):
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise QueryParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            yield kind, value, line, col
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    yield "eof", "", line, col


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.tokens[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise QueryParseError(f"expected {want!r}, found {got!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def varlist(self, allow_empty: bool):
        out = []
        if allow_empty and self.peek()[1] == ")":
            return out
        out.append(self.take("name")[1])
        while self.peek()[1] == ",":
            self.take("punct", ",")
            out.append(self.take("name")[1])
        return out

    def query(self) -> ConjunctiveQuery:
        name = self.take("name")[1]
        self.take("punct", "(")
        head = self.varlist(allow_empty=True)
        self.take("punct", ")")
        _, _, line, col = self.take("turnstile")
        if self.peek()[1] == ".":
            raise QueryParseError("query body is empty", line, col)
        body = [self.atom()]
        while self.peek()[1] == ",":
            self.take("punct", ",")
            body.append(self.atom())
        self.take("punct", ".")
        self.take("eof")
        body_vars = {v for a in body for v in a.args}
        for v in head:
            if v not in body_vars:
                raise QueryParseError(f"head variable {v} does not occur in the body", 1, 1)
        return ConjunctiveQuery(tuple(head), tuple(body), name)

    def atom(self) -> Atom:
        rel = self.take("name")[1]
        self.take("punct", "(")
        args = self.varlist(allow_empty=False)
        self.take("punct", ")")
        return Atom(rel, tuple(args))


def parse_query(text: str) -> ConjunctiveQuery:
    return _Parser(text).query()


def render_query(q: ConjunctiveQuery) -> str:
    return f"{q.name}({','.join(q.head)}) :- {', '.join(map(str, q.body))}."


# --------------------------------------------------------------------------
# query families used throughout the reductions


def cycle_query(k: int, boolean: bool = True, prefix: str = "v") -> ConjunctiveQuery:
    vs = [f"{prefix}{i}" for i in range(1, k + 1)]
    body = [Atom(f"R{i + 1}", (vs[i], vs[(i + 1) % k])) for i in range(k)]
    return ConjunctiveQuery(() if boolean else tuple(vs), body)


def triangle_query(boolean: bool = True) -> ConjunctiveQuery:
    x, y, z = "x", "y", "z"
    body = [Atom("R1", (x, y)), Atom("R2", (y, z)), Atom("R3", (z, x))]
    return ConjunctiveQuery(() if boolean else (x, y, z), body)


def loomis_whitney_query(k: int, boolean: bool = True) -> ConjunctiveQuery:
    xs = [f"x{i}" for i in range(1, k + 1)]
    body = []
    for missing in range(k, 0, -1):
        scope = tuple(v for j, v in enumerate(xs, 1) if j != missing)
        body.append(Atom("R_" + "".join(v[1:] for v in scope), scope))
    return ConjunctiveQuery(() if boolean else tuple(xs), body)


def star_query(
    k: int,
    self_joins: bool = True,
    center_free: bool = False,
    width: int = 1,
) -> ConjunctiveQuery:
    """Star with ``k`` arms around a centre ``z``.

    ``self_joins`` uses one symbol ``R`` for every arm; otherwise ``R1..Rk``.
    ``width > 1`` gives every arm ``width`` leaf variables (relation arity
    ``width + 1``).
    """
    head, body = [], []
    for i in range(1, k + 1):
        leaves = [f"x{i}"] if width == 1 else [f"x{i}_{j}" for j in range(1, width + 1)]
        head.extend(leaves)
        body.append(Atom("R" if self_joins else f"R{i}", (*leaves, "z")))
    if center_free:
        head.append("z")
    return ConjunctiveQuery(tuple(head), body)


def clique_query(k: int, boolean: bool = False) -> ConjunctiveQuery:
    xs = [f"x{i}" for i in range(1, k + 1)]
    body = [Atom("E", (a, b)) for a, b in itertools.permutations(xs, 2)]
    return ConjunctiveQuery(() if boolean else tuple(xs), body)
