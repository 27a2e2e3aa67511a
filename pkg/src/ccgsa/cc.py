"""CCGSA-DG: cooperative coevolution with differential grouping and GSA as
the subcomponent optimiser."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import gsa
from .benchmarks import EvalCounter, GroupStructure, ObjectiveFunction, counted
from .errors import BudgetExhaustedError, ConfigurationError
from .grouping import GroupingConfig, GroupingReport, group


@dataclass(frozen=True)
class CcConfig:
    cycles: int = 20
    gsa: gsa.GsaParams = field(default_factory=gsa.GsaParams)
    fe_budget: int = 3_000_000
    grouping: GroupingConfig = field(default_factory=GroupingConfig)
    seed: int = 0
    # Evaluations granted to one subcomponent GSA run.  None splits the
    # budget left after grouping evenly over cycles x groups.
    fe_per_invocation: Optional[int] = None
    # Refresh the context member after every group instead of once per cycle.
    refresh_best: bool = False
    # Optimise the groups of a cycle concurrently against a frozen context.
    parallel: bool = False
    workers: Optional[int] = None

    def __post_init__(self):
        if self.cycles < 1:
            raise ConfigurationError("cycles must be >= 1")
        if self.fe_budget <= 0:
            raise ConfigurationError("fe_budget must be positive")
        if self.fe_per_invocation is not None and self.fe_per_invocation < self.gsa.pop_size:
            raise ConfigurationError("fe_per_invocation must cover at least one population")


class ContextPopulation:
    """``N`` copies of the best member; only the active group's columns vary."""

    def __init__(self, base, group, size):
        self.base = np.asarray(base, dtype=float).copy()
        self.group = np.asarray(group, dtype=int)
        self.size = size
        self.matrix = np.tile(self.base, (size, 1))
        self._mask = np.ones(self.base.size, dtype=bool)
        self._mask[self.group] = False

    def fill(self, sub):
        sub = np.atleast_2d(sub)
        if sub.shape[1] != self.group.size:
            raise ConfigurationError(f"expected {self.group.size} group coordinates, got {sub.shape[1]}")
        full = np.tile(self.base, (sub.shape[0], 1))
        full[:, self.group] = sub
        return full

    def isolated(self, full):
        """True when every row equals the base outside the active group."""
        return bool(np.array_equal(np.atleast_2d(full)[:, self._mask],
                                   np.broadcast_to(self.base[self._mask], (np.atleast_2d(full).shape[0], self._mask.sum()))))

    def subproblem(self, obj):
        ctx = self

        def fn(sub):
            return obj.fn(ctx.fill(sub))

        return ObjectiveFunction(f"{obj.name}[{self.group.size}]", self.group.size,
                                 obj.lower[self.group], obj.upper[self.group], fn)


def subcomponent_fitness(context, group, sub_x, obj, counter=None):
    """Fitness of ``context.base`` with the ``group`` coordinates set to ``sub_x``."""
    group = np.asarray(group, dtype=int)
    sub_x = np.asarray(sub_x, dtype=float)
    if sub_x.shape != (group.size,):
        raise ConfigurationError(f"sub vector has shape {sub_x.shape}, group has {group.size} indices")
    full = context.base.copy()
    full[group] = sub_x
    if counter is not None:
        counter.add(1)
    return obj(full)


def write_back(pop, group, subpop):
    group = np.asarray(group, dtype=int)
    if group.size == 0:
        raise ConfigurationError("group must not be empty")
    subpop = np.asarray(subpop, dtype=float)
    if subpop.shape != (pop.shape[0], group.size):
        raise ConfigurationError(f"subpop shape {subpop.shape} does not match ({pop.shape[0]}, {group.size})")
    out = pop.copy()
    out[:, group] = subpop
    return out


@dataclass
class RunResult:
    best_position: np.ndarray
    best_fitness: float
    trace: list
    groups: GroupStructure
    evaluations_used: int
    grouping: Optional[GroupingReport] = None
    cycles_completed: int = 0
    result: Optional[np.ndarray] = None
    parallel: bool = False


class _Best:
    """Best-so-far over every evaluated full-dimensional point."""

    def __init__(self, counter, sink):
        self.counter = counter
        self.sink = sink
        self.x = None
        self.f = np.inf

    def offer(self, x, f):
        if f < self.f:
            self.f = float(f)
            self.x = np.array(x, dtype=float)

    def report(self, local_best=np.inf):
        if self.sink is not None:
            self.sink(self.counter.count, min(self.f, local_best))


def _allowance(cfg, remaining, n_groups, cycles_left):
    """Evaluations per group for the current cycle.

    ``remaining`` excludes this cycle's population evaluation; later cycles
    still need theirs.  Recomputed every cycle, so whatever a GSA run leaves
    unused rolls forward.
    """
    if cfg.fe_per_invocation is not None:
        return cfg.fe_per_invocation
    N = cfg.gsa.pop_size
    share = (remaining - (cycles_left - 1) * N) // (cycles_left * n_groups)
    return max(share, 2 * N)


def _optimize_group(f, base, idx, pop_cols, cfg, grant, rng, best, monitor, cycle):
    N = cfg.gsa.pop_size
    ctx = ContextPopulation(base, idx, N)
    sub = ctx.subproblem(f)
    if monitor is not None:
        monitor("group", cycle=cycle, group=idx, base=ctx.base)
    # Schedules span the steps this grant affords, so G decays fully.
    iters = max(1, min(cfg.gsa.max_iter, grant // N - 1))
    res = gsa.optimize(sub, cfg.gsa, pop_cols, grant, rng, max_iter=iters,
                       trace=lambda _e, b: best.report(b))
    return ctx, res


def run_ccgsa_dg(obj, cfg=CcConfig(), rng=None, trace=None, monitor=None):
    """Group once, then optimise each group with GSA for ``cfg.cycles`` cycles.

    ``trace(evaluations, best_so_far)`` is called after every evaluated
    batch.  ``monitor(event, **info)`` is told before each evaluation phase
    starts (``"grouping"``, ``"cycle"``, ``"group"``, ``"final"``); it
    exists for instrumentation.
    """
    rng = np.random.default_rng(cfg.seed if rng is None else rng)
    counter = EvalCounter()
    f = counted(obj, counter)
    N = cfg.gsa.pop_size

    if monitor is not None:
        monitor("grouping")
    report = group(f, cfg.grouping, budget=cfg.fe_budget)
    structure = report.structure
    groups = [np.asarray(g, dtype=int) for g in structure]
    if cfg.fe_budget - counter.count < 2 * N:
        raise BudgetExhaustedError("no budget left for optimisation after grouping", report)

    best = _Best(counter, trace)
    pop = rng.uniform(obj.lower, obj.upper, (N, obj.dim))
    result = np.full(obj.dim, np.nan)
    outer = []
    cycles = 0
    b = None

    for cycle in range(cfg.cycles):
        if cfg.fe_budget - counter.count < N:
            break
        if monitor is not None:
            monitor("cycle", cycle=cycle, pop=pop.copy())
        fit = f(pop)
        b = int(np.argmin(fit))
        best.offer(pop[b], fit[b])
        best.report()
        base, base_f = pop[b].copy(), float(fit[b])

        grants = []
        # One evaluation stays reserved for scoring the assembled row.
        remaining = cfg.fe_budget - counter.count - 1
        allowance = _allowance(cfg, remaining, len(groups), cfg.cycles - cycle)
        for _ in groups:
            grant = min(remaining, allowance)
            if grant < N:
                break
            grants.append(grant)
            remaining -= grant
        complete = len(grants) == len(groups)

        if cfg.parallel:
            streams = rng.spawn(len(grants))
            with ThreadPoolExecutor(cfg.workers) as ex:
                futures = [ex.submit(_optimize_group, f, base, idx, pop[:, idx], cfg, grant, s, best, None, cycle)
                           for idx, grant, s in zip(groups, grants, streams)]
                outcomes = [fu.result() for fu in futures]
        else:
            outcomes = []
            for idx, grant in zip(groups, grants):
                ctx, res = _optimize_group(f, base, idx, pop[:, idx], cfg, grant, rng, best, monitor, cycle)
                outcomes.append((ctx, res))
                best.offer(ctx.fill(res.best_position)[0], res.best_fitness)
                if cfg.refresh_best and res.best_fitness < base_f:
                    base[idx] = res.best_position
                    base_f = res.best_fitness

        for idx, (ctx, res) in zip(groups, outcomes):
            assert ctx.isolated(ctx.fill(res.swarm.positions))
            final = res.swarm.positions.copy()
            # Elitism: the cycle's best row keeps the best sub-vector found.
            final[b] = res.best_position
            pop = write_back(pop, idx, final)
            result[idx] = res.best_position
            best.offer(ctx.fill(res.best_position)[0], res.best_fitness)
        best.report()
        outer.append((counter.count, best.f))
        if complete:
            cycles += 1
        else:
            break

    if b is not None and counter.count < cfg.fe_budget:
        # Row b now holds every group's best sub-vector.
        if monitor is not None:
            monitor("final", row=pop[b].copy())
        best.offer(pop[b], f(pop[b]))
        best.report()
        outer.append((counter.count, best.f))

    return RunResult(best.x, best.f, outer, structure, counter.count, report, cycles, result, cfg.parallel)
