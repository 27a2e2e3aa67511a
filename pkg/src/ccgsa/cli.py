"""Command-line entry point: ``ccgsa run|summarize|compare``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .errors import ConfigurationError

# CLI flag -> config key
_OVERRIDES = {
    "algorithm": "algorithm",
    "function": "function",
    "dim": "dim",
    "runs": "runs",
    "seed": "seed",
    "fe_budget": "fe_budget",
    "cycles": "cycles",
    "pop": "pop",
    "epsilon_dg": "epsilon_dg",
    "out": "out",
    "workers": "workers",
}


def build_parser():
    p = argparse.ArgumentParser(prog="ccgsa", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a seeded multi-run experiment")
    run.add_argument("--config", type=Path, help="flat key = value config file")
    run.add_argument("--algorithm", choices=harness.ALGORITHMS)
    run.add_argument("--function", help="F1, F4, F6, F8, F9, F10, Griewank or 'structured'")
    run.add_argument("--dim", type=int)
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--fe-budget", type=int)
    run.add_argument("--cycles", type=int)
    run.add_argument("--pop", type=int)
    run.add_argument("--epsilon-dg", type=float)
    run.add_argument("--emit-groups", action="store_true", default=None)
    run.add_argument("--out")
    run.add_argument("--workers", type=int)
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override any other config key")

    s = sub.add_parser("summarize", help="rebuild summary.tsv from run records")
    s.add_argument("--in", dest="indir", required=True)

    c = sub.add_parser("compare", help="tabulate medians across experiment directories")
    c.add_argument("--in", dest="indirs", nargs="+", required=True)
    c.add_argument("--out", help="write the machine-readable table here")
    return p


def _run(args):
    overrides = {key: getattr(args, flag) for flag, key in _OVERRIDES.items()}
    overrides["emit_groups"] = args.emit_groups
    for item in args.set:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        overrides[k.strip().replace("-", "_")] = v
    cfg = harness.load_config(args.config, **overrides)
    records, row = harness.run_experiment(cfg)
    print(f"{row.function} dim={row.dim} {row.algorithm}: best={row.best:.6g} median={row.median:.6g} "
          f"mean={row.mean:.6g} worst={row.worst:.6g} failed={row.failed}/{row.runs} -> {cfg.out}")
    return 0


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "summarize":
            row = harness.summarize_dir(args.indir)
            print(row.to_tsv())
            return 0
        pretty, tsv = harness.compare_dirs(args.indirs)
        print(pretty, end="")
        if args.out:
            Path(args.out).write_text(tsv)
        return 0
    except ConfigurationError as e:
        print(f"ccgsa: configuration error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"ccgsa: I/O error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
