"""Seeded multi-run experiments: config parsing, run execution, trace and
summary files, convergence tables and algorithm comparison tables."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .benchmarks import ALIASES, GroupStructure, make_classical, make_structured
from .cc import CcConfig, run_ccgsa_dg
from .errors import BudgetExhaustedError, ConfigurationError, NumericFailureError, NumericInputError
from .grouping import GroupingConfig, GroupingReport
from .gsa import GsaParams, run_gsa

log = logging.getLogger(__name__)

ALGORITHMS = ("gsa", "ccgsa-dg")


@dataclass
class ExperimentConfig:
    algorithm: str = "ccgsa-dg"
    function: str = "F1"
    dim: int = 30
    # structured problems (function = "structured")
    category: str = "ten-group"
    base: str = "rastrigin"
    group_size: Optional[int] = None
    problem_seed: int = 0
    runs: int = 25
    seed: int = 0
    fe_budget: int = 3_000_000
    cycles: int = 20
    pop: int = 50
    max_iter: Optional[int] = 500  # None: plain GSA stretches t_max over the budget
    g0: float = 100.0
    alpha: float = 20.0
    epsilon_force: float = 1e-10
    kbest_final: int = 1
    epsilon_dg: float = 1e-3
    fe_per_invocation: Optional[int] = None
    refresh_best: bool = False
    trace_stride: int = 1000
    emit_groups: bool = False
    out: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")
        if self.trace_stride < 1:
            raise ConfigurationError("trace_stride must be >= 1")

    # Fields that do not change results are left out of the fingerprint.
    _UNFINGERPRINTED = ("out", "workers", "emit_groups")

    def fingerprint(self):
        items = [f"{f.name}={getattr(self, f.name)!r}" for f in fields(self)
                 if f.name not in self._UNFINGERPRINTED]
        return hashlib.sha256("\n".join(items).encode()).hexdigest()[:16]

    def run_seed(self, r):
        return self.seed + r

    @property
    def label(self):
        if self.function == "structured":
            return f"{self.category}/{self.base}"
        return ALIASES.get(self.function, self.function)

    def gsa_params(self):
        max_iter = self.max_iter
        if max_iter is None:
            max_iter = max(1, self.fe_budget // self.pop - 1)
        return GsaParams(self.pop, max_iter, self.g0, self.alpha, self.epsilon_force, self.kbest_final)

    def cc_config(self, seed):
        return CcConfig(self.cycles, self.gsa_params(), self.fe_budget,
                        GroupingConfig(self.epsilon_dg), seed, self.fe_per_invocation, self.refresh_best)


def _coerce(name, text):
    typ = {f.name: f.type for f in fields(ExperimentConfig)}.get(name)
    if typ is None:
        raise ConfigurationError(f"unknown config key {name!r}")
    text = str(text).strip()
    if "Optional" in str(typ) and text.lower() in ("none", "auto", ""):
        return None
    try:
        if "int" in str(typ):
            return int(float(text)) if "e" in text.lower() else int(text)
        if "float" in str(typ):
            return float(text)
        if "bool" in str(typ):
            if text.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return text.lower() in ("true", "1", "yes")
    except ValueError:
        raise ConfigurationError(f"bad value {text!r} for {name}") from None
    return text


def parse_config_text(text):
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = _coerce(key, value)
    return values


def load_config(path=None, **overrides):
    values = {}
    if path is not None:
        try:
            values = parse_config_text(Path(path).read_text())
        except OSError as e:
            raise ConfigurationError(f"cannot read config {path}: {e}") from None
    for k, v in overrides.items():
        if v is not None:
            values[k] = _coerce(k, v) if isinstance(v, str) else v
    return ExperimentConfig(**values)


def config_to_text(cfg):
    return "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in fields(cfg))


def build_problem(cfg):
    """Return ``(objective, truth)``; ``truth`` is None for classical functions."""
    if cfg.function == "structured":
        sp = make_structured(cfg.category, cfg.dim, cfg.group_size, cfg.base, cfg.problem_seed)
        return sp.objective, sp.truth
    return make_classical(cfg.function, cfg.dim), None


class TraceRecorder:
    """Keeps a point whenever best-so-far improves or a stride boundary passes.

    Rows come out with strictly increasing evaluation counts.
    """

    def __init__(self, stride=1000):
        self.stride = stride
        self.points = []
        self._last = None

    def __call__(self, evals, best):
        self._last = (int(evals), float(best))
        if self.points:
            e0, b0 = self.points[-1]
            if evals == e0:
                self.points[-1] = (e0, min(b0, best))
                return
            if best >= b0 and evals // self.stride == e0 // self.stride:
                return
            best = min(best, b0)
        self.points.append((int(evals), float(best)))

    def finish(self):
        if self._last is not None and self.points and self._last[0] > self.points[-1][0]:
            self.points.append((self._last[0], min(self._last[1], self.points[-1][1])))
        return self.points


@dataclass
class RunRecord:
    fingerprint: str
    seed: int
    best_fitness: float
    evaluations_used: int
    fe_budget: int
    duration: float
    trace: list = field(default_factory=list)
    groups: Optional[list] = None
    grouping_evaluations: Optional[int] = None
    grouping_checks: Optional[int] = None
    cycles_completed: Optional[int] = None
    error: Optional[str] = None

    def to_json(self):
        d = dataclasses.asdict(self)
        d.pop("trace")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, text, trace=()):
        return cls(**json.loads(text), trace=list(trace))


@dataclass
class SummaryRow:
    function: str
    dim: int
    algorithm: str
    best: float
    median: float
    mean: float
    worst: float
    mean_evaluations: float
    runs: int
    failed: int = 0
    grouping: str = ""

    COLUMNS = ("function", "dim", "algorithm", "best", "median", "mean", "worst",
               "mean_evaluations", "runs", "failed", "grouping")

    def to_tsv(self):
        vals = [getattr(self, c) for c in self.COLUMNS]
        return "\t".join(repr(v) if isinstance(v, float) else str(v) for v in vals)

    @classmethod
    def from_tsv(cls, line):
        parts = line.rstrip("\n").split("\t")
        parts += [""] * (len(cls.COLUMNS) - len(parts))
        d = dict(zip(cls.COLUMNS, parts))
        return cls(d["function"], int(d["dim"]), d["algorithm"],
                   *(float(d[k]) for k in ("best", "median", "mean", "worst", "mean_evaluations")),
                   int(d["runs"]), int(d["failed"] or 0), d["grouping"])


def format_groups(groups):
    return "|".join(",".join(str(i) for i in g) for g in groups)


def parse_groups(text):
    return [[int(i) for i in g.split(",")] for g in text.split("|") if g]


def execute_run(cfg, r):
    """One seeded run; numeric failures are captured in the record."""
    seed = cfg.run_seed(r)
    obj, _ = build_problem(cfg)
    recorder = TraceRecorder(cfg.trace_stride)
    t0 = time.perf_counter()
    rec = RunRecord(cfg.fingerprint(), seed, math.nan, 0, cfg.fe_budget, 0.0)
    try:
        if cfg.algorithm == "gsa":
            _, best, used = run_gsa(obj, cfg.gsa_params(), cfg.fe_budget, np.random.default_rng(seed), recorder)
            rec.best_fitness, rec.evaluations_used = best, used
        else:
            res = run_ccgsa_dg(obj, cfg.cc_config(seed), trace=recorder)
            rec.best_fitness, rec.evaluations_used = res.best_fitness, res.evaluations_used
            rec.groups = [list(g) for g in res.groups]
            rec.grouping_evaluations = res.grouping.evaluations_used
            rec.grouping_checks = res.grouping.pairwise_checks
            rec.cycles_completed = res.cycles_completed
    except (NumericFailureError, NumericInputError, BudgetExhaustedError) as e:
        rec.error = f"{type(e).__name__}: {e}"
        partial = getattr(e, "partial", None)
        if isinstance(partial, GroupingReport):
            rec.evaluations_used = partial.evaluations_used
    rec.duration = time.perf_counter() - t0
    rec.trace = recorder.finish()
    return rec


def _trace_text(trace):
    return "evaluations\tbest\n" + "".join(f"{e}\t{b!r}\n" for e, b in trace)


def read_trace(path):
    rows = Path(path).read_text().splitlines()[1:]
    return [(int(e), float(b)) for e, b in (r.split("\t") for r in rows)]


def summarize_records(records, cfg_or_meta):
    ok = [r for r in records if r.error is None]
    vals = np.array([r.best_fitness for r in ok], dtype=float)
    if vals.size:
        best, median, mean, worst = vals.min(), float(np.median(vals)), vals.mean(), vals.max()
        mean_evals = float(np.mean([r.evaluations_used for r in ok]))
    else:
        best = median = mean = worst = mean_evals = math.nan
    groups = next((r.groups for r in ok if r.groups is not None), None)
    return SummaryRow(cfg_or_meta["label"], int(cfg_or_meta["dim"]), cfg_or_meta["algorithm"],
                      float(best), float(median), float(mean), float(worst), mean_evals,
                      len(records), len(records) - len(ok), format_groups(groups) if groups else "")


def _meta(cfg):
    return {"label": cfg.label, "dim": cfg.dim, "algorithm": cfg.algorithm}


def write_summary(path, rows):
    Path(path).write_text("\t".join(SummaryRow.COLUMNS) + "\n" + "".join(r.to_tsv() + "\n" for r in rows))


def read_summary(path):
    lines = Path(path).read_text().splitlines()[1:]
    return [SummaryRow.from_tsv(ln) for ln in lines if ln.strip()]


def _check_writable(out):
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as e:
        raise OSError(f"output directory {out} is not writable: {e}") from None


def run_experiment(cfg):
    """Execute ``cfg.runs`` seeded runs and write all result files.

    Returns ``(records, summary_row)``.
    """
    out = Path(cfg.out)
    _check_writable(out)
    build_problem(cfg)  # configuration errors surface before any run starts

    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            records = list(ex.map(execute_run, [cfg] * cfg.runs, range(cfg.runs)))
    else:
        records = [execute_run(cfg, r) for r in range(cfg.runs)]

    (out / "experiment.cfg").write_text(config_to_text(cfg))
    for rec in records:
        (out / f"run_{rec.seed}.trace").write_text(_trace_text(rec.trace))
        (out / f"run_{rec.seed}.record").write_text(rec.to_json() + "\n")
        if rec.error:
            log.warning("run %d failed: %s", rec.seed, rec.error)
    row = summarize_records(records, _meta(cfg))
    write_summary(out / "summary.tsv", [row])
    if cfg.emit_groups:
        rec = next((r for r in records if r.groups is not None), None)
        if rec is not None:
            report = GroupingReport(GroupStructure(rec.groups), rec.grouping_evaluations, rec.grouping_checks)
            (out / "groups.txt").write_text(report.to_text())
    traced = [r for r in records if r.trace]
    if traced:
        emit_convergence(traced, out / "convergence.tsv")
    return records, row


def read_groups(path):
    return GroupingReport.from_text(Path(path).read_text())


def load_records(in_dir):
    in_dir = Path(in_dir)
    records = []
    for p in sorted(in_dir.glob("run_*.record"), key=lambda p: int(p.stem.split("_")[1])):
        trace_path = p.with_suffix(".trace")
        trace = read_trace(trace_path) if trace_path.exists() else []
        records.append(RunRecord.from_json(p.read_text(), trace))
    if not records:
        raise ConfigurationError(f"no run records in {in_dir}")
    return records


def summarize_dir(in_dir):
    """Rebuild ``summary.tsv`` in ``in_dir`` from its run records."""
    in_dir = Path(in_dir)
    cfg = load_config(in_dir / "experiment.cfg")
    row = summarize_records(load_records(in_dir), _meta(cfg))
    write_summary(in_dir / "summary.tsv", [row])
    return row


def emit_convergence(records, path=None):
    """Tabulate per-run best-so-far on the union of evaluation counts.

    Each run is forward-filled between its own trace points; the grid starts
    where every run has at least one point.  Returns the table text and
    writes it to ``path`` when given.
    """
    if not records:
        raise ConfigurationError("no records to tabulate")
    traces = [r.trace for r in records]
    start = max(t[0][0] for t in traces)
    grid = sorted({e for t in traces for e, _ in t if e >= start})
    cols = []
    for t in traces:
        ev = np.array([e for e, _ in t])
        bs = np.array([b for _, b in t])
        cols.append(bs[np.searchsorted(ev, grid, side="right") - 1])
    mat = np.column_stack(cols) if cols else np.empty((len(grid), 0))
    med = np.median(mat, axis=1)
    header = "# evaluations\t" + "\t".join(f"seed_{r.seed}" for r in records) + "\tmedian\n"
    body = "".join(f"{e}\t" + "\t".join(repr(float(v)) for v in row) + f"\t{float(m)!r}\n"
                   for e, row, m in zip(grid, mat, med))
    text = header + body
    if path is not None:
        Path(path).write_text(text)
    return text


def _sci(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "-"
    return f"{v:.2e}"


def compare_table(summaries):
    """Median comparison: one row per (function, dim), one column per algorithm.

    Returns ``(pretty_text, tsv_text)``.  Missing combinations show as ``-``.
    """
    algos = sorted({s.algorithm for s in summaries}, key=lambda a: (a != "ccgsa-dg", a))
    keys = sorted({(s.function, s.dim) for s in summaries}, key=lambda k: (k[0], k[1]))
    cell = {(s.function, s.dim, s.algorithm): s.median for s in summaries}
    head = ["function", "dim"] + algos
    rows = [[f, str(d)] + [_sci(cell.get((f, d, a))) for a in algos] for f, d in keys]
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
    pretty = "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in [head] + rows) + "\n"
    tsv_rows = [[f, str(d)] + [repr(cell[(f, d, a)]) if (f, d, a) in cell else "" for a in algos]
                for f, d in keys]
    tsv = "\n".join("\t".join(r) for r in [head] + tsv_rows) + "\n"
    return pretty, tsv


def parse_compare_tsv(text):
    """Inverse of the machine-readable half of ``compare_table``."""
    lines = text.splitlines()
    algos = lines[0].split("\t")[2:]
    out = {}
    for ln in lines[1:]:
        f, d, *vals = ln.split("\t")
        for a, v in zip(algos, vals):
            if v:
                out[(f, int(d), a)] = float(v)
    return out


def compare_dirs(dirs):
    rows = []
    for d in dirs:
        path = Path(d) / "summary.tsv"
        if not path.exists():
            raise ConfigurationError(f"{path} not found; run summarize first")
        rows.extend(read_summary(path))
    return compare_table(rows)
