"""Wall-clock scaling curves and log-log exponent fits."""

from __future__ import annotations

import csv
from array import array
import gc
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .access import build_lex_index, lex_access
from .engine import enumerate_answers, yannakakis_boolean
from .fastlinalg import NAIVE, STRATEGIES, ayz_triangle, dense_triangle
from .generators import (
    bipartite_regular_graph,
    enumeration_instance,
    path_query,
    scaled_acyclic_instance,
)

SUITES = ("triangle", "yannakakis", "enumerate-delay", "lex-access")

DEFAULT_SIZES = {
    "triangle": [1000, 2000, 4000, 8000, 16000],
    "yannakakis": [1000, 3000, 10000, 30000, 100000],
    "enumerate-delay": [1000, 3000, 10000, 30000, 100000],
    "lex-access": [1000, 3000, 10000, 30000, 100000],
}


@dataclass
class BenchConfig:
    seed: int = 0
    repeats: int = 7
    drop: int = 2  # smallest sizes excluded from the fit
    degree: int = 10
    strategy: str = "naive"
    accesses: int = 2000


@dataclass
class Curve:
    name: str
    sizes: list[int] = field(default_factory=list)
    values: list[float] = field(default_factory=list)

    def slope(self, drop: int = 2) -> float:
        return fit_slope(self.sizes, self.values, drop)


def fit_slope(xs, ys, drop: int = 2) -> float:
    """Least-squares slope of log y against log x, ignoring the ``drop`` smallest x."""
    pairs = sorted(zip(xs, ys))[drop:]
    if len(pairs) < 2:
        pairs = sorted(zip(xs, ys))
    lx = np.log([p[0] for p in pairs])
    ly = np.log([max(p[1], 1e-9) for p in pairs])
    return float(np.polyfit(lx, ly, 1)[0])


def best_time(fn, repeats: int = 3) -> float:
    """Minimum wall time over ``repeats`` runs, with the collector paused."""
    best = float("inf")
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
    finally:
        if enabled:
            gc.enable()
    return best


def gap_trace(it, capacity: int = 1 << 18) -> np.ndarray:
    """Time between consecutive answers (the wait for the first one excluded).

    Timestamps go into a preallocated, already touched float array: growing a
    list or keeping float objects alive would page-fault at fixed positions
    and show up as delay.
    """
    enabled = gc.isenabled()
    gc.disable()
    stamps = array("d", bytes(8 * capacity))
    n = 0
    clock = time.perf_counter
    try:
        for _ in it:
            if n == len(stamps):
                stamps.extend(array("d", bytes(8 * len(stamps))))
            stamps[n] = clock()
            n += 1
    finally:
        if enabled:
            gc.enable()
    return np.diff(np.frombuffer(stamps, dtype=np.float64, count=n))


def stable_max_gap(make_iter, repeats: int) -> float:
    """Worst per-answer delay that recurs in every run.

    Enumeration is deterministic, so work tied to answer i shows up at
    position i in every repeat; scheduler and interrupt noise does not.  We
    take the minimum over repeats at each position, then the maximum.
    """
    traces = [gap_trace(make_iter()) for _ in range(max(1, repeats))]
    if not len(traces[0]):
        return 0.0
    return float(np.vstack(traces).min(axis=0).max())


def bench_yannakakis(sizes, cfg: BenchConfig) -> list[Curve]:
    curve = Curve("yannakakis_boolean")
    for m in sizes:
        q, db = scaled_acyclic_instance(m, random.Random(cfg.seed + m))
        curve.sizes.append(db.size)
        curve.values.append(best_time(lambda: yannakakis_boolean(q, db), cfg.repeats))
    return [curve]


def bench_triangle(sizes, cfg: BenchConfig) -> list[Curve]:
    strategy = STRATEGIES.get(cfg.strategy, NAIVE)
    ayz, dense = Curve(f"ayz_triangle[{strategy.name}]"), Curve(f"dense_triangle[{strategy.name}]")
    for m in sizes:
        edges = bipartite_regular_graph(m, cfg.degree, random.Random(cfg.seed + m))
        for curve, fn in ((ayz, ayz_triangle), (dense, dense_triangle)):
            curve.sizes.append(len(edges))
            curve.values.append(best_time(lambda: fn(edges, strategy), cfg.repeats))
    return [ayz, dense]


def bench_enumerate_delay(sizes, cfg: BenchConfig) -> list[Curve]:
    curve = Curve("enumerate_answers max gap")
    for m in sizes:
        q, db = enumeration_instance(m, random.Random(cfg.seed + m))
        curve.sizes.append(db.size)
        curve.values.append(stable_max_gap(lambda: iter(enumerate_answers(q, db)), cfg.repeats))
    return [curve]


def bench_lex_access(sizes, cfg: BenchConfig) -> list[Curve]:
    curve = Curve("lex_access mean time")
    q = path_query(3, boolean=False)
    for m in sizes:
        rng = random.Random(cfg.seed + m)
        _, db = scaled_acyclic_instance(m, rng, atoms=3)
        idx = build_lex_index(q, q.head, db)
        probes = [rng.randint(1, idx.total) for _ in range(cfg.accesses)] if idx.total else []

        def run():
            for i in probes:
                lex_access(idx, i)

        t = best_time(run, cfg.repeats)
        curve.sizes.append(db.size)
        curve.values.append(t / max(1, len(probes)))
    return [curve]


RUNNERS = {
    "triangle": bench_triangle,
    "yannakakis": bench_yannakakis,
    "enumerate-delay": bench_enumerate_delay,
    "lex-access": bench_lex_access,
}


def run_suite(suite: str, sizes=None, cfg: BenchConfig | None = None) -> list[Curve]:
    cfg = cfg or BenchConfig()
    sizes = list(sizes) if sizes else DEFAULT_SIZES[suite]
    return RUNNERS[suite](sizes, cfg)


def write_curves(curves: list[Curve], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["series", "m", "seconds"])
        for c in curves:
            for m, t in zip(c.sizes, c.values):
                w.writerow([c.name, m, f"{t:.9f}"])
