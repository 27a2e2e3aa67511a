"""Convergence data for GSA and CCGSA-DG on Rastrigin, gnuplot-ready."""

import argparse
from pathlib import Path

from ccgsa.harness import ExperimentConfig, run_experiment


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--fe-budget", type=int, default=100_000)
    p.add_argument("--runs", type=int, default=3)
    p.add_argument("--out", type=Path, default=Path("results/convergence_f9"))
    args = p.parse_args()
    for algo, extra in (("gsa", dict(pop=50, max_iter=None)), ("ccgsa-dg", dict(cycles=5, pop=20))):
        cfg = ExperimentConfig(algorithm=algo, function="F9", dim=args.dim, fe_budget=args.fe_budget,
                               runs=args.runs, out=str(args.out / algo), **extra)
        run_experiment(cfg)
        print(f"{algo}: {cfg.out}/convergence.tsv")


if __name__ == "__main__":
    main()
