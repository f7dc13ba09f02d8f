"""Run every scaling suite, write one CSV per suite and print the fitted slopes."""

from __future__ import annotations

import argparse
from pathlib import Path

from fgcq.bench import DEFAULT_SIZES, SUITES, BenchConfig, run_suite, write_curves


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results", help="directory for the CSV files")
    p.add_argument("--suites", default=",".join(SUITES))
    p.add_argument("--repeats", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quick", action="store_true", help="only the three smallest sizes")
    args = p.parse_args()

    cfg = BenchConfig(seed=args.seed, repeats=args.repeats)
    out = Path(args.out)
    for suite in args.suites.split(","):
        sizes = DEFAULT_SIZES[suite][:3] if args.quick else DEFAULT_SIZES[suite]
        curves = run_suite(suite, sizes, cfg)
        write_curves(curves, out / f"{suite}.csv")
        for c in curves:
            vals = ", ".join(f"{v:.3g}" for v in c.values)
            print(f"{suite:16s} {c.name:32s} slope {c.slope(cfg.drop):5.2f}  [{vals}]")


if __name__ == "__main__":
    main()
