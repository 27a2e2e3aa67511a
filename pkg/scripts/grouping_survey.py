"""Group random structured problems and report how often the truth is recovered."""

import argparse

import numpy as np

from ccgsa.benchmarks import BASES, CATEGORIES, make_structured
from ccgsa.grouping import GroupingConfig, group


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--problems", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon-dg", type=float, default=1e-3)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    cfg = GroupingConfig(epsilon_dg=args.epsilon_dg)
    tally = {}
    for _ in range(args.problems):
        category = str(rng.choice([c for c in CATEGORIES if c != "twenty-group"]))
        base = str(rng.choice(BASES))
        dim = int(rng.integers(40, 101))
        gs = {"fully-separable": None, "single-group": int(rng.integers(2, dim // 2 + 1)),
              "ten-group": dim // 20, "fully-nonseparable": dim}[category]
        sp = make_structured(category, dim, gs, base, int(rng.integers(2**31)))
        rep = group(sp.objective, cfg)
        hit, n, evals = tally.get((category, base), (0, 0, 0))
        tally[(category, base)] = (hit + rep.structure.same_partition(sp.truth), n + 1, evals + rep.evaluations_used)

    for (category, base), (hit, n, evals) in sorted(tally.items()):
        print(f"{category:20s} {base:14s} {hit:3d}/{n:<3d} mean evaluations {evals / n:9.1f}")


if __name__ == "__main__":
    main()
