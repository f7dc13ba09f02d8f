"""Command-line front end: ``fgcq analyze | run | reduce | bench``."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import access, bench, engine, fastlinalg, oracles, reductions
from .errors import DimensionMismatch, FgcqError, QueryParseError
from .query import ConjunctiveQuery, loomis_whitney_query, parse_query
from .storage import Database, load_database, load_weights
from .structure import structure_report

EXIT_OK, EXIT_PARSE, EXIT_REFUSED, EXIT_RUNTIME = 0, 2, 3, 4

TRIANGLE = "Triangle"
HYPERCLIQUE = "Hyperclique"
SETH = "SETH"
SPARSE_BMM = "Sparse-BMM"
THREESUM = "3SUM"


class Refusal(Exception):
    """The requested task is outside the tractable class for this query."""

    def __init__(self, task: str, klass: dict):
        self.task = task
        self.klass = klass
        super().__init__(f"refusing {task}: {klass['class']}")


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# classification


def _cyclic_hardness(q: ConjunctiveQuery) -> list[str]:
    if all(a.arity == 2 for a in q.body):
        return [TRIANGLE]
    return [TRIANGLE, HYPERCLIQUE]


def _entry(tractable: bool, klass: str, hyps=None) -> dict:
    return {"tractable": tractable, "class": klass, "hypotheses": list(hyps or [])}


def classify(q: ConjunctiveQuery, report: dict, order=None) -> dict:
    """Predicted complexity per task, read off the structure report only."""
    acyclic, fc = report["acyclic"], report["free_connex"]
    hard = _cyclic_hardness(q)
    out = {}
    if acyclic:
        out["decide"] = _entry(True, "O(m)")
    else:
        out["decide"] = _entry(False, "no O~(m) decision", hard)
    if fc:
        out["count"] = _entry(True, "O(m)")
        out["enumerate"] = _entry(True, "O(m) preprocessing, O(1) delay")
    elif acyclic:
        out["count"] = _entry(False, "no O~(m) counting (acyclic, not free-connex)", [SETH])
        out["enumerate"] = _entry(
            False, "no O~(m) preprocessing with O~(1) delay (acyclic, not free-connex)", [SPARSE_BMM]
        )
    else:
        out["count"] = _entry(False, "no O~(m) counting (cyclic)", hard)
        out["enumerate"] = _entry(False, "no O~(m) preprocessing with O~(1) delay (cyclic)", hard)

    if not q.is_join_query:
        out["lex-access"] = _entry(False, "supported for join queries only")
        out["sum-access"] = _entry(False, "supported for join queries only")
    else:
        trios = report.get("trios") or []
        if not acyclic:
            out["lex-access"] = _entry(False, "no O~(m) preprocessing with O~(1) access (cyclic)", hard)
        elif trios:
            out["lex-access"] = _entry(
                False, f"no O~(m) preprocessing with O~(1) access (disruptive trio {trios[0]})", [TRIANGLE]
            )
        else:
            out["lex-access"] = _entry(True, "O~(m) preprocessing, O~(1) access")
        covering = any(a.variables == q.variables for a in q.body)
        if not acyclic:
            out["sum-access"] = _entry(False, "no O~(m) preprocessing with O~(1) access (cyclic)", hard)
        elif covering:
            out["sum-access"] = _entry(True, "O~(m) preprocessing, O~(1) access (covering atom)")
        else:
            out["sum-access"] = _entry(
                False, "no O~(m^(2-e)) preprocessing with O~(m^(1-e)) access (no covering atom)", [THREESUM]
            )
    if not q.is_self_join_free:
        for entry in out.values():
            if not entry["tractable"]:
                entry["class"] += " [lower bound stated for self-join-free queries only]"
    return out


def analyze(q: ConjunctiveQuery, order=None) -> dict:
    report = structure_report(q, order)
    report["query"] = str(q)
    report["classes"] = classify(q, report, order)
    return report


# --------------------------------------------------------------------------
# run


@dataclass
class RunReport:
    task: str
    query: str
    classification: dict
    algorithm: str
    result: object = None
    wall_time: float = 0.0
    counters: dict = field(default_factory=dict)


def _split(s: str | None) -> list[str]:
    return [p.strip() for p in s.split(",") if p.strip()] if s else []


def _load_query(path) -> ConjunctiveQuery:
    return parse_query(Path(path).read_text(encoding="utf-8"))


def _load_db(q: ConjunctiveQuery, directory) -> Database:
    return load_database(directory, sorted(q.relation_arities().items()))


def _ext(db: Database, t) -> list:
    return list(db.extern(t))


def _intern_prefix(db: Database, values: list[str]) -> list[int] | None:
    if any(v not in db.domain for v in values):
        return None
    return [db.domain.id_of(v) for v in values]


def run_task(args) -> RunReport:
    q = _load_query(args.query)
    db = _load_db(q, args.db)
    order = _split(args.order) or None
    report = structure_report(q, order if q.is_join_query else None)
    classes = classify(q, report)
    task = args.task
    force = args.force_brute
    counters = {"tuples": db.size, "accesses": 0}
    t0 = time.perf_counter()

    def refuse_or_force(klass):
        if not klass["tractable"] and not force:
            raise Refusal(task, klass)
        return not klass["tractable"]

    if task == "boolean":
        if refuse_or_force(classes["decide"]):
            algo, result = "brute-force", bool(engine.brute_force_answers(q, db))
        else:
            algo, result = "yannakakis", engine.yannakakis_boolean(q, db)
    elif task == "count":
        if refuse_or_force(classes["count"]):
            algo, result = "brute-force", len(engine.brute_force_answers(q, db))
        else:
            algo, result = "free-connex counting", engine.count_answers(q, db)
    elif task == "enumerate":
        if refuse_or_force(classes["enumerate"]):
            algo, answers = "brute-force", sorted(engine.brute_force_answers(q, db))
        else:
            algo, answers = "constant-delay enumeration", list(engine.enumerate_answers(q, db))
        limit = args.limit if args.limit is not None else len(answers)
        result = {"count": len(answers), "answers": [_ext(db, t) for t in answers[:limit]]}
    elif task in ("access", "test"):
        if not q.is_join_query:
            raise UsageError(f"{task} needs a join query (head = all body variables)")
        if task == "access" and args.i is None:
            raise UsageError("--i is required for access")
        if args.weights and task == "access":
            weights = load_weights(args.weights, db.domain)
            if refuse_or_force(classes["sum-access"]):
                algo, idx = "materialized sum order", access.materialized_sum_order(q, weights, db)
            else:
                algo, idx = "sum-order index", access.sum_order_index(q, weights, db)
            t = idx.access(args.i)
            counters["accesses"] = 1
            result = {"i": args.i, "answer": _ext(db, t), "weight": weights.tuple_weight(t)}
        else:
            if order is None:
                raise UsageError(f"--order is required for {task}")
            if refuse_or_force(classes["lex-access"]):
                algo = "materialized sorted answers"
                idx = access.materialized_lex_index(q, order, db, args.domain_order)
            else:
                algo = "lexicographic index"
                idx = access.build_lex_index(q, order, db, args.domain_order)
            if task == "access":
                counters["accesses"] = 1
                result = {"i": args.i, "answer": _ext(db, idx.access(args.i))}
            else:
                prefix_vals = _split(args.prefix)
                ids = _intern_prefix(db, prefix_vals)
                found = ids is not None and access.test_prefix(idx, ids)
                counters["accesses"] = max(1, math.ceil(math.log2(idx.total + 1)))
                result = {"prefix": prefix_vals, "present": bool(found)}
    elif task == "tropical":
        if not args.weights:
            raise UsageError("--weights DIR is required for tropical")
        if not q.is_join_query:
            raise UsageError("tropical aggregation needs a join query")
        weights = engine.load_tuple_weights(args.weights, db, q.relation_arities())
        if refuse_or_force(classes["decide"]):
            algo = "brute-force join"
        else:
            algo = "join-tree (min,+) dynamic program"
        value = engine.tropical_aggregate(q, db, weights, default=args.default_weight)
        result = None if value == math.inf else value
    else:  # argparse restricts choices
        raise UsageError(f"unknown task {task}")
    wall = time.perf_counter() - t0
    klass_key = {"boolean": "decide", "test": "lex-access", "tropical": "decide"}.get(task, task)
    if task == "access" and args.weights:
        klass_key = "sum-access"
    elif task == "access":
        klass_key = "lex-access"
    return RunReport(task, q.name, classes[klass_key], algo, result, wall, counters)


# --------------------------------------------------------------------------
# reduce


def run_reduction(args) -> dict:
    kind = args.kind
    if kind == "triangle":
        g = reductions.load_graph(args.graph)
        q = _load_query(args.query)
        db = reductions.triangle_to_cyclic_db(g, q)
        out = {"query_true": engine.decide(q, db), "db_size": db.size}
        if args.check:
            out["oracle"] = oracles.brute_triangle(g)
    elif kind == "hyperclique":
        inst = reductions.load_hypergraph(args.hypergraph)
        db = reductions.hyperclique_to_lw_db(inst, args.k)
        out = {"query_true": engine.decide(loomis_whitney_query(args.k), db), "db_size": db.size}
        if args.check:
            out["oracle"] = oracles.brute_hyperclique(inst.n, inst.edges, args.k)
    elif kind == "kds":
        g = reductions.load_graph(args.graph)
        db, decision = reductions.kds_to_star_count(g, args.k, args.kprime)
        out = {"dominating_set": decision, "db_size": db.size}
        if args.check:
            out["oracle"] = oracles.brute_dominating_set(g, args.kprime)
    elif kind == "bmm":
        a, b = fastlinalg.load_matrix(args.a), fastlinalg.load_matrix(args.b)
        nz = reductions_bmm(a, b)
        out = {"nonzeros": [list(p) for p in nz]}
        if args.check:
            out["oracle"] = [list(p) for p in fastlinalg.bmm(a, b).coords()]
    elif kind == "threesum":
        a, b, c = reductions.load_threesum(args.input)
        q = _load_query(args.query) if args.query else None
        out = {"threesum": reductions.threesum_via_sum_order(a, b, c, q)}
        if args.check:
            out["oracle"] = oracles.brute_3sum(a, b, c)
    elif kind == "clique-embedding":
        g = reductions.load_graph(args.graph)
        if args.query:
            q, psi = _load_query(args.query), reductions.load_embedding(args.psi)
        else:
            q, psi = reductions.five_cycle_embedding()
        value = reductions.min_weight_clique_via_embedding(g, q, psi)
        out = {"min_weight": None if value == math.inf else value}
        if args.check:
            gw = g if g.weights is not None else oracles.Graph(g.n, g.edges, {e: 1 for e in g.edges})
            ref = oracles.brute_min_weight_clique(gw, len(psi))
            out["oracle"] = None if ref == math.inf else ref
    else:
        raise UsageError(f"unknown reduction {kind}")
    return out


def reductions_bmm(a: fastlinalg.BoolMatrix, b: fastlinalg.BoolMatrix):
    if a.n != b.n:
        raise DimensionMismatch(f"{a.n}x{a.n} vs {b.n}x{b.n}")
    return fastlinalg.sparse_bmm_via_star(a.coords(), b.coords())


# --------------------------------------------------------------------------
# entry point


def _sizes(s: str | None) -> list[int] | None:
    return [int(float(p)) for p in _split(s)] or None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fgcq", description="Conjunctive query evaluation by dichotomy.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="structure report and predicted complexity per task")
    a.add_argument("query")
    a.add_argument("--order", help="comma-separated variable order for trio detection")

    r = sub.add_parser("run", help="evaluate a query, dispatching on its structure")
    r.add_argument("--task", required=True,
                   choices=["boolean", "count", "enumerate", "access", "test", "tropical"])
    r.add_argument("query")
    r.add_argument("db", help="directory of <relation>.csv files")
    r.add_argument("--order")
    r.add_argument("--i", type=int)
    r.add_argument("--prefix")
    r.add_argument("--weights", help="value weights file (access) or tuple-weight directory (tropical)")
    r.add_argument("--default-weight", type=float)
    r.add_argument("--domain-order", choices=["id", "value"], default="id")
    r.add_argument("--limit", type=int)
    r.add_argument("--force-brute", action="store_true")

    d = sub.add_parser("reduce", help="run a reduction gadget end to end")
    dsub = d.add_subparsers(dest="kind", required=True)
    for name in ["triangle", "hyperclique", "kds", "bmm", "threesum", "clique-embedding"]:
        x = dsub.add_parser(name)
        x.add_argument("--check", action="store_true", help="also run the brute-force oracle")
        if name in ("triangle", "kds", "clique-embedding"):
            x.add_argument("--graph", required=True)
        if name in ("triangle", "threesum", "clique-embedding"):
            x.add_argument("--query", required=(name == "triangle"))
        if name == "hyperclique":
            x.add_argument("--hypergraph", required=True)
            x.add_argument("--k", type=int, default=4)
        if name == "kds":
            x.add_argument("--k", type=int, default=2)
            x.add_argument("--kprime", type=int, required=True)
        if name == "bmm":
            x.add_argument("--a", required=True)
            x.add_argument("--b", required=True)
        if name == "threesum":
            x.add_argument("--input", required=True)
        if name == "clique-embedding":
            x.add_argument("--psi", help="JSON mapping clique vertex -> variables")

    b = sub.add_parser("bench", help="scaling curves with log-log slope fits")
    b.add_argument("suite", choices=list(bench.SUITES))
    b.add_argument("--sizes")
    b.add_argument("--out")
    b.add_argument("--repeats", type=int, default=7)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--strategy", choices=sorted(fastlinalg.STRATEGIES), default="naive")
    return p


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, default=str))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            q = _load_query(args.query)
            _emit(analyze(q, _split(args.order) or None))
        elif args.command == "run":
            _emit(asdict(run_task(args)))
        elif args.command == "reduce":
            if args.kind == "clique-embedding" and args.query and not args.psi:
                raise UsageError("--psi is required with --query")
            _emit(run_reduction(args))
        elif args.command == "bench":
            cfg = bench.BenchConfig(seed=args.seed, repeats=args.repeats, strategy=args.strategy)
            curves = bench.run_suite(args.suite, _sizes(args.sizes), cfg)
            if args.out:
                bench.write_curves(curves, args.out)
            _emit({c.name: {"m": c.sizes, "seconds": c.values, "slope": c.slope(cfg.drop)}
                   for c in curves})
    except QueryParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except Refusal as e:
        print(f"refused: {e.task} is {e.klass['class']}; hardness rests on "
              f"{', '.join(e.klass['hypotheses']) or 'no hypothesis'}. Use --force-brute to run anyway.",
              file=sys.stderr)
        return EXIT_REFUSED
    except (FgcqError, UsageError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
