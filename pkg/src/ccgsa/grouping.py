"""Differential grouping: detect pairwise variable interactions with
finite differences and partition the dimensions accordingly."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .benchmarks import GroupStructure
from .errors import BudgetExhaustedError, ConfigurationError, NumericInputError


@dataclass(frozen=True)
class GroupingConfig:
    epsilon_dg: float = 1e-3
    probe_delta: Union[float, str] = "span"
    base_point: str = "lower"

    def __post_init__(self):
        if not self.epsilon_dg > 0:
            raise ConfigurationError("epsilon_dg must be positive")
        if self.probe_delta != "span" and not float(self.probe_delta) > 0:
            raise ConfigurationError("probe_delta must be positive or 'span'")
        if self.base_point not in ("lower", "center"):
            raise ConfigurationError(f"unknown base_point rule {self.base_point!r}")

    def base(self, obj):
        if self.base_point == "lower":
            return obj.lower.copy()
        return 0.5 * (obj.lower + obj.upper)

    def target(self, obj):
        """Where ``x_j`` is moved: halfway from the base point to the upper bound."""
        return 0.5 * (self.base(obj) + obj.upper)

    def delta(self, obj):
        if self.probe_delta == "span":
            return obj.upper - obj.lower
        return np.full(obj.dim, float(self.probe_delta))


@dataclass
class GroupingReport:
    structure: Optional[GroupStructure]
    evaluations_used: int
    pairwise_checks: int
    partial_groups: Optional[list] = None

    def to_text(self):
        lines = [f"# evaluations_used={self.evaluations_used} "
                 f"pairwise_checks={self.pairwise_checks} groups={len(self.structure)}"]
        lines += [" ".join(str(i) for i in g) for g in self.structure]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        header, *rows = [ln for ln in text.splitlines() if ln.strip()]
        meta = dict(kv.split("=") for kv in header.lstrip("# ").split())
        groups = [[int(i) for i in row.split()] for row in rows]
        return cls(GroupStructure(groups), int(meta["evaluations_used"]), int(meta["pairwise_checks"]))


def _eval(obj, points):
    vals = np.asarray(obj(np.atleast_2d(points)), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericInputError("objective returned a non-finite value while probing interactions")
    return vals


def _check(obj, i, j):
    if i == j or not (0 <= i < obj.dim and 0 <= j < obj.dim):
        raise ConfigurationError(f"invalid index pair ({i}, {j}) for dim {obj.dim}")


def interaction_measure(obj, i, j, cfg=GroupingConfig(), counter=None):
    """``|delta1 - delta2|`` for the pair (i, j), using four evaluations."""
    _check(obj, i, j)
    x1 = cfg.base(obj)
    x2 = x1.copy()
    x2[i] += cfg.delta(obj)[i]
    mid = cfg.target(obj)[j]
    x3, x4 = x1.copy(), x2.copy()
    x3[j] = mid
    x4[j] = mid
    f = _eval(obj, np.stack([x1, x2, x3, x4]))
    if counter is not None:
        counter.add(4)
    return abs((f[1] - f[0]) - (f[3] - f[2]))


def detect_interaction(obj, i, j, cfg=GroupingConfig(), counter=None):
    return interaction_measure(obj, i, j, cfg, counter) > cfg.epsilon_dg


class _Prober:
    """Cached probes around the base point, charged against a budget."""

    def __init__(self, obj, cfg, budget):
        self.obj, self.cfg, self.budget = obj, cfg, budget
        self.x = cfg.base(obj)
        self.delta = cfg.delta(obj)
        self.mid = cfg.target(obj)
        self.used = 0
        self.checks = 0
        self.groups = []
        self._f_moved_i = {}
        self._f_mid_j = {}
        self.f0 = self._f(self.x)

    def _f(self, x):
        if self.budget is not None and self.used + 1 > self.budget:
            partial = GroupingReport(None, self.used, self.checks, [list(g) for g in self.groups])
            raise BudgetExhaustedError(
                f"grouping needs more than the {self.budget} evaluations available", partial)
        self.used += 1
        return float(_eval(self.obj, x)[0])

    def moved_i(self, i):
        if i not in self._f_moved_i:
            x = self.x.copy()
            x[i] += self.delta[i]
            self._f_moved_i[i] = self._f(x)
        return self._f_moved_i[i]

    def mid_j(self, j):
        if j not in self._f_mid_j:
            x = self.x.copy()
            x[j] = self.mid[j]
            self._f_mid_j[j] = self._f(x)
        return self._f_mid_j[j]

    def interacts(self, i, j):
        x = self.x.copy()
        x[i] += self.delta[i]
        x[j] = self.mid[j]
        d1 = self.moved_i(i) - self.f0
        d2 = self._f(x) - self.mid_j(j)
        self.checks += 1
        return abs(d1 - d2) > self.cfg.epsilon_dg


def group(obj, cfg=GroupingConfig(), budget=None):
    """Partition ``range(obj.dim)`` so every detected interacting pair shares a block.

    Sweeps each unassigned dimension against the remaining ones and follows
    detected interactions transitively.  Dimensions without interactions come
    back as singletons.  Probe values are cached, so a pair check costs one
    fresh evaluation plus the per-dimension probes it first touches.
    """
    if obj.dim < 1:
        raise ConfigurationError("dim must be >= 1")
    p = _Prober(obj, cfg, budget)
    remaining = list(range(obj.dim))
    while remaining:
        seed = remaining.pop(0)
        block = [seed]
        p.groups.append(block)
        frontier = [seed]
        while frontier and remaining:
            k = frontier.pop(0)
            joined = [j for j in remaining if p.interacts(k, j)]
            for j in joined:
                remaining.remove(j)
            block.extend(joined)
            frontier.extend(joined)
        block.sort()
    return GroupingReport(GroupStructure(p.groups, obj.dim), p.used, p.checks)
