"""Direct access to the sorted answer array of a join query.

Lexicographic orders use a layered prefix-count index.  Walking the variable
order backwards, each variable ``v`` owns the component of the hypergraph
induced by itself and the later variables; that component's answer count
depends only on the earlier variables adjacent to it (its *context*).  For
every context we store the sorted candidate values of ``v`` with cumulative
completion counts, so the i-th answer is found one variable at a time by
binary search.  Acyclicity plus the absence of disruptive trios guarantees
each context together with ``v`` fits inside one atom, which bounds the index
by the database size.

Sum orders are supported only when one atom covers every variable; the
answers are then materialised and sorted by weight.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .engine import (
    _positions,
    _reduce_factors,
    atom_factor,
    enumerate_answers,
    join_answers,
    node_factors,
    project,
    semijoin,
)
from .errors import (
    DisruptiveTrioPresent,
    NoCoveringAtom,
    NotAcyclic,
    NotFreeConnex,
    OutOfRange,
    PrefixMismatch,
)
from .query import ConjunctiveQuery, build_hypergraph
from .storage import Database, WeightMap
from .structure import find_disruptive_trios, gyo_acyclicity, query_join_tree


def domain_rank(db: Database, mode: str = "id") -> list[int]:
    """rank[id] under the chosen domain order ("id" or "value")."""
    n = len(db.domain)
    if mode == "id":
        return list(range(n))
    if mode == "value":
        ordered = sorted(range(n), key=lambda i: str(db.domain.value(i)))
        rank = [0] * n
        for r, i in enumerate(ordered):
            rank[i] = r
        return rank
    raise ValueError(f"unknown domain order {mode!r}")


@dataclass
class _Layer:
    var: str
    context: tuple[str, ...]
    children: list[int]
    # context tuple -> (candidate values sorted by rank, inclusive cumulative counts)
    table: dict = field(default_factory=dict)
    totals: dict = field(default_factory=dict)


@dataclass
class DirectAccessIndex:
    head: tuple[str, ...]
    order: tuple[str, ...]
    layers: list[_Layer]
    roots: list[int]
    rank: list[int]
    total: int

    def __len__(self) -> int:
        return self.total

    def access(self, i: int) -> tuple[int, ...]:
        return lex_access(self, i)


def build_lex_index(
    q: ConjunctiveQuery, order: Sequence[str], db: Database, domain_order: str = "id"
) -> DirectAccessIndex:
    if not q.is_join_query:
        raise ValueError("lexicographic direct access is implemented for join queries")
    order = tuple(order)
    trios = find_disruptive_trios(q, order)  # also validates the order
    if not gyo_acyclicity(build_hypergraph(q))[0]:
        raise NotAcyclic(f"query {q} is cyclic")
    if trios:
        raise DisruptiveTrioPresent(trios[0])
    rank = domain_rank(db, domain_order)

    tree = query_join_tree(q)
    factors = _reduce_factors(tree, node_factors(q, tree, db))
    pos = {v: i for i, v in enumerate(order)}
    h = build_hypergraph(q)
    n = len(order)

    # elimination forest over positions, built from the last variable backwards
    comp_top = list(range(n))  # union-find parent over positions

    def find(x):
        while comp_top[x] != x:
            comp_top[x] = comp_top[comp_top[x]]
            x = comp_top[x]
        return x

    children: list[list[int]] = [[] for _ in range(n)]
    context: list[set] = [set() for _ in range(n)]
    for i in range(n - 1, -1, -1):
        v = order[i]
        nbrs = h.neighbours(v)
        ctx = {u for u in nbrs if pos[u] < i}
        tops = {find(pos[u]) for u in nbrs if pos[u] > i}
        for t in sorted(tops):
            children[i].append(t)
            ctx |= {u for u in context[t] if u != v}
            comp_top[t] = i
        context[i] = ctx

    layers = [
        _Layer(order[i], tuple(sorted(context[i], key=pos.get)), children[i]) for i in range(n)
    ]
    checks: list[list[int]] = [[] for _ in range(n)]
    for k, node in enumerate(tree.nodes):
        checks[max(pos[v] for v in node)].append(k)
    node_keys = [set(f[1]) for f in factors]

    for i in range(n - 1, -1, -1):
        layer = layers[i]
        scope = layer.context + (layer.var,)
        cover = next((k for k, node in enumerate(tree.nodes) if set(scope) <= node), None)
        if cover is None:
            raise AssertionError(f"no node covers {scope}; trio-free acyclic orders always have one")
        check_pos = [(k, _positions(scope, factors[k][0])) for k in checks[i]]
        child_pos = [(layers[j].totals, _positions(scope, layers[j].context)) for j in children[i]]
        grouped: dict = {}
        for alpha in project(factors[cover], scope):
            if not all(tuple(alpha[p] for p in cp) in node_keys[k] for k, cp in check_pos):
                continue
            count = 1
            for totals, cp in child_pos:
                count *= totals.get(tuple(alpha[p] for p in cp), 0)
                if not count:
                    break
            if count:
                grouped.setdefault(alpha[:-1], []).append((alpha[-1], count))
        for ctx, entries in grouped.items():
            entries.sort(key=lambda e: rank[e[0]])
            cands, cum, running = [], [], 0
            for val, c in entries:
                running += c
                cands.append(val)
                cum.append(running)
            layer.table[ctx] = (cands, cum)
            layer.totals[ctx] = running

    roots = [i for i in range(n) if find(i) == i]
    total = 1
    for r in roots:
        total *= layers[r].totals.get((), 0)
    return DirectAccessIndex(q.head, order, layers, roots, rank, total)


def lex_access(idx: DirectAccessIndex, i: int) -> tuple[int, ...]:
    """The i-th answer (1-based) in the lexicographic order of the index."""
    if not 1 <= i <= idx.total:
        raise OutOfRange(f"position {i} outside 1..{idx.total}")
    r = i - 1
    layers = idx.layers
    values: dict[str, int] = {}
    active = list(idx.roots)
    for L, layer in enumerate(layers):
        active.remove(L)
        m = 1
        for j in active:
            other = layers[j]
            m *= other.totals[tuple(values[u] for u in other.context)]
        cands, cum = layer.table[tuple(values[u] for u in layer.context)]
        k = bisect_right(cum, r // m)
        before = cum[k - 1] if k else 0
        r -= before * m
        values[layer.var] = cands[k]
        active.extend(layer.children)
    return tuple(values[v] for v in idx.head)


@dataclass
class MaterializedLexIndex:
    """Sorted answer array with the same interface as :class:`DirectAccessIndex`.

    Works for any query shape at superlinear cost; used as the fallback
    outside the tractable class.
    """

    head: tuple[str, ...]
    order: tuple[str, ...]
    answers: list[tuple[int, ...]]
    rank: list[int]

    @property
    def total(self) -> int:
        return len(self.answers)

    def __len__(self) -> int:
        return len(self.answers)

    def access(self, i: int) -> tuple[int, ...]:
        if not 1 <= i <= len(self.answers):
            raise OutOfRange(f"position {i} outside 1..{len(self.answers)}")
        return self.answers[i - 1]


def materialized_lex_index(
    q: ConjunctiveQuery, order: Sequence[str], db: Database, domain_order: str = "id"
) -> MaterializedLexIndex:
    if not q.is_join_query:
        raise ValueError("lexicographic direct access is implemented for join queries")
    order = tuple(order)
    find_disruptive_trios(q, order)  # validates the order
    rank = domain_rank(db, domain_order)
    pos = [q.head.index(v) for v in order]
    answers = sorted(join_answers(q, db), key=lambda t: tuple(rank[t[p]] for p in pos))
    return MaterializedLexIndex(q.head, order, answers, rank)


def test_prefix(idx, prefix: Sequence[int]) -> bool:
    """Does some answer start with ``prefix`` (over the first variables of the order)?

    Binary search over positions using only ``idx.access``.
    """
    prefix = tuple(prefix)
    if len(prefix) > len(idx.order):
        raise PrefixMismatch(f"prefix of length {len(prefix)} exceeds order {idx.order}")
    if not prefix:
        return idx.total > 0
    if any(not 0 <= v < len(idx.rank) for v in prefix):
        return False
    hpos = [idx.head.index(v) for v in idx.order[: len(prefix)]]
    target = tuple(idx.rank[v] for v in prefix)

    def key(i):
        t = idx.access(i)
        return tuple(idx.rank[t[p]] for p in hpos)

    lo, hi = 1, idx.total + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if key(mid) < target:
            lo = mid + 1
        else:
            hi = mid
    return lo <= idx.total and key(lo) == target


# --------------------------------------------------------------------------
# sum orders


@dataclass
class SumOrderIndex:
    answers: list[tuple[int, ...]]
    weights: list[int]

    def __len__(self) -> int:
        return len(self.answers)

    @property
    def total(self) -> int:
        return len(self.answers)

    def access(self, i: int) -> tuple[int, ...]:
        if not 1 <= i <= len(self.answers):
            raise OutOfRange(f"position {i} outside 1..{len(self.answers)}")
        return self.answers[i - 1]


def _sorted_by_weight(answers, weights: WeightMap) -> SumOrderIndex:
    keyed = sorted((weights.tuple_weight(t), t) for t in answers)
    return SumOrderIndex([t for _, t in keyed], [w for w, _ in keyed])


def sum_order_index(q: ConjunctiveQuery, weights: WeightMap, db: Database) -> SumOrderIndex:
    if not q.is_join_query:
        raise ValueError("sum-order access is implemented for join queries")
    cover = next((a for a in q.body if a.variables == q.variables), None)
    if cover is None:
        raise NoCoveringAtom(f"no atom of {q} contains all variables")
    f = atom_factor(cover, db)
    for a in q.body:
        if a is not cover:
            f = semijoin(f, atom_factor(a, db))
    return _sorted_by_weight(project(f, q.head), weights)


def materialized_sum_order(q: ConjunctiveQuery, weights: WeightMap, db: Database) -> SumOrderIndex:
    """Sort the fully materialised answer set; works for any query shape."""
    try:
        answers = set(enumerate_answers(q, db))
    except NotFreeConnex:
        answers = join_answers(q, db)
    return _sorted_by_weight(answers, weights)


def find_weight(access: Callable[[int], tuple], total: int, weight_of, target) -> int | None:
    """Position of an answer of weight ``target`` by binary search over accesses, else None."""
    lo, hi = 1, total + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if weight_of(access(mid)) < target:
            lo = mid + 1
        else:
            hi = mid
    if lo <= total and weight_of(access(lo)) == target:
        return lo
    return None


test_prefix.__test__ = False  # keep pytest from collecting it
