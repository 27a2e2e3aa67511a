"""Run GSA and CCGSA-DG on the classical suite and print a median table.

Desk mode (default) uses dims 30 and 200 with 200k evaluations.  ``--long``
switches to dims 30/500/1000 with 3e6 evaluations and 25 runs, which takes
many CPU hours.
"""

import argparse
from pathlib import Path

from ccgsa.harness import ExperimentConfig, compare_table, run_experiment

FUNCTIONS = ("F1", "F4", "F6", "F8", "F9", "F10", "Griewank")


def configs(args):
    if args.long:
        dims, budget, runs = (30, 500, 1000), 3_000_000, 25
        cc = dict(cycles=20, pop=50, max_iter=500)
    else:
        dims, budget, runs = (30, 200), 200_000, args.runs
        cc = dict(cycles=5, pop=20)
    for fid in args.functions:
        for dim in dims:
            common = dict(function=fid, dim=dim, fe_budget=budget, runs=runs, seed=args.seed, workers=args.workers)
            yield ExperimentConfig(algorithm="gsa", pop=50, max_iter=None,
                                   out=str(args.out / f"gsa_{fid}_{dim}"), **common)
            yield ExperimentConfig(algorithm="ccgsa-dg", out=str(args.out / f"cc_{fid}_{dim}"), **cc, **common)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--long", action="store_true")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--functions", nargs="+", default=list(FUNCTIONS))
    p.add_argument("--out", type=Path, default=Path("results/table3"))
    args = p.parse_args()

    rows = []
    for cfg in configs(args):
        _, row = run_experiment(cfg)
        print(f"{cfg.algorithm:9s} {row.function:8s} {row.dim:5d}  median {row.median:.3e}  mean {row.mean:.3e}")
        rows.append(row)
    pretty, tsv = compare_table(rows)
    print()
    print(pretty, end="")
    (args.out / "compare.tsv").write_text(tsv)


if __name__ == "__main__":
    main()
