"""Evaluation algorithms for conjunctive queries.

Everything here works on *factors*: a tuple of variable names plus a set of
rows over those variables.  Atoms become factors (repeated variables are
checked and collapsed), join-tree nodes become factors by merging the atoms
folded into them, and the algorithms are semijoin passes and dynamic
programs over join trees.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from pathlib import Path
from typing import Iterator, Mapping

from .errors import DataError, InvalidTree, MissingWeight, NotAcyclic, NotFreeConnex
from .query import Atom, ConjunctiveQuery, build_hypergraph
from .storage import Database, Relation
from .structure import JoinTree, _gyo, connex_tree, gyo_acyclicity, query_join_tree

Factor = tuple[tuple[str, ...], set]


# --------------------------------------------------------------------------
# factor primitives


def _positions(src: tuple[str, ...], dst) -> list[int]:
    return [src.index(v) for v in dst]


def atom_factor(atom: Atom, db: Database) -> Factor:
    """Rows of ``atom`` projected onto its distinct variables."""
    rel = db.relation(atom.relation, atom.arity)
    vars_ = atom.distinct_args()
    if len(vars_) == atom.arity:
        return vars_, rel.rows
    first = [atom.args.index(v) for v in vars_]
    checks = [(i, atom.args.index(v)) for i, v in enumerate(atom.args) if atom.args.index(v) != i]
    rows = {
        tuple(t[p] for p in first)
        for t in rel.rows
        if all(t[i] == t[j] for i, j in checks)
    }
    return vars_, rows


def project(f: Factor, vars_) -> set:
    """Distinct rows of ``f`` restricted to ``vars_``, as a set."""
    pos = _positions(f[0], vars_)
    if pos == list(range(len(f[0]))):
        rows = f[1]
        return rows if isinstance(rows, (set, frozenset)) else set(rows)
    return {tuple(r[p] for p in pos) for r in f[1]}


def semijoin(left: Factor, right: Factor) -> Factor:
    """Rows of ``left`` that agree with some row of ``right`` on shared variables.

    The surviving rows keep their order; row collections are never mutated.
    """
    shared = [v for v in left[0] if v in right[0]]
    if not shared:
        return left if right[1] else (left[0], [])
    if len(shared) == 1:  # scalar keys avoid building one-element tuples
        rp, lp = right[0].index(shared[0]), left[0].index(shared[0])
        keys = {r[rp] for r in right[1]}
        return left[0], [r for r in left[1] if r[lp] in keys]
    keys = project(right, shared)
    pos = _positions(left[0], shared)
    return left[0], [r for r in left[1] if tuple(r[p] for p in pos) in keys]


def _group(f: Factor, key_vars) -> dict:
    pos = _positions(f[0], key_vars)
    groups: dict = defaultdict(list)
    for r in f[1]:
        groups[tuple(r[p] for p in pos)].append(r)
    return groups


def node_factors(q: ConjunctiveQuery, tree: JoinTree, db: Database) -> list[Factor]:
    """One factor per tree node: its exact-scope atoms intersected, then
    filtered by the smaller atoms folded into it."""
    atom_fs = [atom_factor(a, db) for a in q.body]
    out = []
    for i, node in enumerate(tree.nodes):
        vars_ = tuple(sorted(node))
        attached = [k for k, n in enumerate(tree.atom_node) if n == i]
        exact = [k for k in attached if q.body[k].variables == node]
        if not exact:
            raise InvalidTree(f"node {sorted(node)} is not the scope of any atom")
        first = atom_fs[exact[0]]
        rows = first[1] if first[0] == vars_ else project(first, vars_)
        for k in exact[1:]:
            keep = project(atom_fs[k], vars_)
            rows = [r for r in rows if r in keep]
        f: Factor = (vars_, rows)
        for k in attached:
            if k not in exact:
                f = semijoin(f, atom_fs[k])
        out.append(f)
    return out


def _reduce_factors(tree: JoinTree, factors: list[Factor], full: bool = True) -> list[Factor]:
    factors = list(factors)
    order = tree.preorder()
    for n in reversed(order):
        p = tree.parent[n]
        if p >= 0:
            factors[p] = semijoin(factors[p], factors[n])
    if full:
        for n in order:
            p = tree.parent[n]
            if p >= 0:
                factors[n] = semijoin(factors[n], factors[p])
    return factors


def _acyclic_tree(q: ConjunctiveQuery) -> JoinTree:
    try:
        return query_join_tree(q)
    except NotAcyclic:
        raise NotAcyclic(f"query {q} is cyclic") from None


def _validate_tree(q: ConjunctiveQuery, tree: JoinTree) -> JoinTree:
    h = build_hypergraph(q)
    if set(tree.nodes) != set(h.maximal_edges()) or len(tree.nodes) != len(set(tree.nodes)):
        raise InvalidTree("tree nodes are not the maximal hyperedges of the query")
    if not tree.satisfies_running_intersection():
        raise InvalidTree("tree violates running intersection")
    atom_node = tree.atom_node
    if len(atom_node) != len(q.body) or any(
        not a.variables <= tree.nodes[n] for a, n in zip(q.body, atom_node)
    ):
        atom_node = [
            next(i for i, n in enumerate(tree.nodes) if a.variables <= n) for a in q.body
        ]
    return JoinTree(tree.nodes, tree.parent, atom_node)


# --------------------------------------------------------------------------
# oracle and generic join


def _static_atom_order(q: ConjunctiveQuery, db: Database) -> list[int]:
    remaining = list(range(len(q.body)))
    sizes = {k: len(db.relation(q.body[k].relation, q.body[k].arity)) for k in remaining}
    order: list[int] = []
    bound: set = set()
    while remaining:
        k = max(remaining, key=lambda k: (len(q.body[k].variables & bound), -sizes[k], -k))
        order.append(k)
        remaining.remove(k)
        bound |= q.body[k].variables
    return order


def brute_force_answers(q: ConjunctiveQuery, db: Database) -> set[tuple[int, ...]]:
    """Reference semantics: backtracking over atoms, scanning whole relations."""
    order = [q.body[k] for k in _static_atom_order(q, db)]
    tables = [list(db.relation(a.relation, a.arity).tuples) for a in order]
    out: set = set()
    assign: dict = {}

    def rec(i: int):
        if i == len(order):
            out.add(tuple(assign[v] for v in q.head))
            return
        atom = order[i]
        for t in tables[i]:
            added = []
            ok = True
            for v, val in zip(atom.args, t):
                cur = assign.get(v)
                if cur is None:
                    assign[v] = val
                    added.append(v)
                elif cur != val:
                    ok = False
                    break
            if ok:
                rec(i + 1)
            for v in added:
                del assign[v]

    rec(0)
    return out


def join_assignments(q: ConjunctiveQuery, db: Database) -> Iterator[dict]:
    """All satisfying assignments via index-nested backtracking (any query shape)."""
    order = _static_atom_order(q, db)
    plans = []
    bound: list[str] = []
    for k in order:
        f = atom_factor(q.body[k], db)
        key_vars = [v for v in f[0] if v in bound]
        new_vars = [v for v in f[0] if v not in bound]
        index = _group(f, key_vars)
        new_pos = _positions(f[0], new_vars)
        plans.append((key_vars, new_vars, {key: [tuple(r[p] for p in new_pos) for r in rows]
                                           for key, rows in index.items()}))
        bound.extend(new_vars)
    assign: dict = {}

    def rec(i: int):
        if i == len(plans):
            yield dict(assign)
            return
        key_vars, new_vars, index = plans[i]
        for ext in index.get(tuple(assign[v] for v in key_vars), ()):
            for v, val in zip(new_vars, ext):
                assign[v] = val
            yield from rec(i + 1)
        for v in new_vars:
            assign.pop(v, None)

    yield from rec(0)


def join_answers(q: ConjunctiveQuery, db: Database) -> set[tuple[int, ...]]:
    return {tuple(a[v] for v in q.head) for a in join_assignments(q, db)}


# --------------------------------------------------------------------------
# Yannakakis


def full_reduce(q: ConjunctiveQuery, tree: JoinTree | None, db: Database) -> Database:
    """Shrink every relation used by ``q`` to tuples taking part in some full join result."""
    tree = _acyclic_tree(q) if tree is None else _validate_tree(q, tree)
    factors = _reduce_factors(tree, node_factors(q, tree, db))
    kept: dict[str, set] = defaultdict(set)
    for k, atom in enumerate(q.body):
        f = factors[tree.atom_node[k]]
        allowed = project(f, atom.distinct_args())
        first = [atom.args.index(v) for v in atom.distinct_args()]
        for t in db.relation(atom.relation, atom.arity):
            if all(t[i] == t[atom.args.index(v)] for i, v in enumerate(atom.args)):
                if tuple(t[p] for p in first) in allowed:
                    kept[atom.relation].add(t)
    arities = q.relation_arities()
    return db.with_relations({s: Relation(arities[s], frozenset(kept[s])) for s in arities})


def yannakakis_boolean(q: ConjunctiveQuery, db: Database) -> bool:
    """Is the join of ``q``'s body non-empty?  One bottom-up semijoin pass."""
    tree = _acyclic_tree(q)
    factors = _reduce_factors(tree, node_factors(q, tree, db), full=False)
    return bool(factors[tree.root][1])


def decide(q: ConjunctiveQuery, db: Database) -> bool:
    """Boolean evaluation: Yannakakis when acyclic, backtracking join otherwise."""
    if gyo_acyclicity(build_hypergraph(q))[0]:
        return yannakakis_boolean(q, db)
    return next(join_assignments(q, db), None) is not None


# --------------------------------------------------------------------------
# free-connex counting and enumeration


class _ConnexPlan:
    """Projection of a free-connex query onto its head variables.

    After full reduction, the head-rooted connex tree splits the query into
    subtrees hanging below the head node; projecting each child onto the head
    variables gives an acyclic *join* query over the head whose answers are
    exactly the query's answers.
    """

    def __init__(self, q: ConjunctiveQuery, db: Database):
        if not gyo_acyclicity(build_hypergraph(q))[0]:
            raise NotFreeConnex(f"query {q} is cyclic")
        try:
            ctree, s = connex_tree(q)
        except NotAcyclic:
            raise NotFreeConnex(f"query {q} is acyclic but not free-connex") from None
        tree = query_join_tree(q)
        factors = _reduce_factors(tree, node_factors(q, tree, db))
        head = frozenset(q.head)
        self.empty = False
        parts: list[Factor] = []
        for c in ctree.children()[s]:
            vars_ = tuple(sorted(ctree.nodes[c] & head))
            rows = project(factors[c], vars_)
            if not rows:
                self.empty = True
            if vars_:
                parts.append((vars_, rows))
        self.parts = parts
        if parts:
            ok, _, parent = _gyo([frozenset(p[0]) for p in parts])
            assert ok, "head projection of a free-connex query must be acyclic"
            self.tree = JoinTree([frozenset(p[0]) for p in parts], parent)
        else:
            self.tree = None

    def count(self) -> int:
        if self.empty:
            return 0
        if not self.parts:
            return 1
        tree, parts = self.tree, self.parts
        kids = tree.children()
        counts: list[dict] = [dict() for _ in parts]
        for n in tree.postorder():
            vars_, rows = parts[n]
            aggs = []
            for ch in kids[n]:
                shared = [v for v in vars_ if v in parts[ch][0]]
                pos = _positions(parts[ch][0], shared)
                agg: dict = defaultdict(int)
                for r, c in counts[ch].items():
                    agg[tuple(r[p] for p in pos)] += c
                aggs.append((_positions(vars_, shared), agg))
            table = {}
            for r in rows:
                c = 1
                for pos, agg in aggs:
                    c *= agg.get(tuple(r[p] for p in pos), 0)
                    if not c:
                        break
                if c:
                    table[r] = c
            counts[n] = table
        return sum(counts[tree.root].values())


def count_answers(q: ConjunctiveQuery, db: Database, superlinear: bool = False) -> int:
    """Number of answers of a free-connex query.

    With ``superlinear=True`` queries outside the free-connex class are
    counted by materialising the projection instead of raising.
    """
    try:
        plan = _ConnexPlan(q, db)
    except NotFreeConnex:
        if not superlinear:
            raise
        return len(join_answers(q, db))
    return plan.count()


class EnumerationSession:
    """Constant-delay cursor over the answers of a free-connex query."""

    def __init__(self, q: ConjunctiveQuery, db: Database, superlinear: bool = False):
        self.head = q.head
        try:
            plan = _ConnexPlan(q, db)
        except NotFreeConnex:
            if not superlinear:
                raise
            # outside the class: materialise after full reduction, no delay guarantee
            reduced = full_reduce(q, None, db) if gyo_acyclicity(build_hypergraph(q))[0] else db
            self._gen = iter(sorted(join_answers(q, reduced)))
            return
        self._gen = self._run(plan, q)

    def _run(self, plan: _ConnexPlan, q: ConjunctiveQuery):
        if plan.empty:
            return
        if not plan.parts:
            yield ()
            return
        tree = plan.tree
        parts = _reduce_factors(tree, plan.parts)
        order = tree.preorder()
        where = {n: i for i, n in enumerate(order)}
        k = len(order)
        root_rows = sorted(parts[order[0]][1])
        keys, indexes = [None] * k, [None] * k
        for i, n in enumerate(order[1:], 1):
            p = tree.parent[n]
            shared = [v for v in parts[n][0] if v in parts[p][0]]
            keys[i] = (where[p], _positions(parts[p][0], shared))
            indexes[i] = {key: sorted(rows) for key, rows in _group(parts[n], shared).items()}
        out_map = []
        for v in q.head:
            n = next(n for n in order if v in parts[n][0])
            out_map.append((where[n], parts[n][0].index(v)))
        lists: list = [None] * k
        pos = [0] * k
        rows: list = [None] * k
        lists[0] = root_rows
        j = 0
        while True:
            while j < k:
                rows[j] = lists[j][pos[j]]
                j += 1
                if j < k:
                    pi, ppos = keys[j]
                    pr = rows[pi]
                    lists[j] = indexes[j][tuple(pr[p] for p in ppos)]
                    pos[j] = 0
            yield tuple(rows[i][c] for i, c in out_map)
            j = k - 1
            while j >= 0 and pos[j] + 1 >= len(lists[j]):
                j -= 1
            if j < 0:
                return
            pos[j] += 1

    def __iter__(self):
        return self

    def __next__(self) -> tuple[int, ...]:
        return next(self._gen)


def enumerate_answers(
    q: ConjunctiveQuery, db: Database, superlinear: bool = False
) -> EnumerationSession:
    """Enumerate answers of a free-connex query with constant delay.

    ``superlinear=True`` admits other queries by materialising their answers.
    """
    return EnumerationSession(q, db, superlinear)


# --------------------------------------------------------------------------
# tropical (min, +) aggregation

INF = math.inf


def _weight_lookup(weights: Mapping, default):
    def w(symbol: str, t: tuple) -> float:
        try:
            return weights[(symbol, t)]
        except KeyError:
            if default is None:
                raise MissingWeight(f"no weight for {symbol}{t}") from None
            return default
    return w


def tropical_aggregate(
    q: ConjunctiveQuery, db: Database, tuple_weights: Mapping, default: float | None = None
) -> float:
    """min over join answers of the summed per-atom tuple weights; +inf if no answer."""
    if not q.is_join_query:
        raise ValueError("tropical aggregation is defined for join queries only")
    w = _weight_lookup(tuple_weights, default)
    if not gyo_acyclicity(build_hypergraph(q))[0]:
        best = INF
        for a in join_assignments(q, db):
            total = sum(w(at.relation, tuple(a[v] for v in at.args)) for at in q.body)
            best = min(best, total)
        return best
    tree = query_join_tree(q)
    factors = node_factors(q, tree, db)
    kids = tree.children()
    best_of: list[dict] = [dict() for _ in tree.nodes]
    for n in tree.postorder():
        vars_, rows = factors[n]
        attached = [q.body[k] for k, m in enumerate(tree.atom_node) if m == n]
        atom_pos = [(a.relation, _positions(vars_, a.args)) for a in attached]
        mins = []
        for ch in kids[n]:
            shared = [v for v in vars_ if v in factors[ch][0]]
            cpos = _positions(factors[ch][0], shared)
            agg: dict = {}
            for r, val in best_of[ch].items():
                key = tuple(r[p] for p in cpos)
                if val < agg.get(key, INF):
                    agg[key] = val
            mins.append((_positions(vars_, shared), agg))
        table = {}
        for r in rows:
            total = 0.0
            for sym, pos in atom_pos:
                total += w(sym, tuple(r[p] for p in pos))
            for pos, agg in mins:
                total += agg.get(tuple(r[p] for p in pos), INF)
                if total == INF:
                    break
            if total != INF:
                table[r] = total
        best_of[n] = table
    return min(best_of[tree.root].values(), default=INF)


def load_tuple_weights(directory, db: Database, symbols) -> dict:
    """Read ``<symbol>.w.csv`` files: tuple values followed by the weight."""
    out = {}
    for sym in symbols:
        path = Path(directory) / f"{sym}.w.csv"
        if not path.exists():
            continue
        with path.open(newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row:
                    continue
                *vals, raw = [c.strip() for c in row]
                try:
                    weight = float(raw)
                except ValueError:
                    raise DataError(f"{path}:{lineno}: bad weight {raw!r}") from None
                if not all(v in db.domain for v in vals):
                    continue
                out[(sym, db.intern_tuple(vals))] = weight
    return out
