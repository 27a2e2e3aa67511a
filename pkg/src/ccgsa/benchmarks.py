"""Benchmark objectives: the classical scalable suite and a structured-problem
builder with known separability.

Every objective evaluates either a single point of shape ``(dim,)`` (returning a
float) or a batch of shape ``(n, dim)`` (returning an ``(n,)`` array).  All
functions are minimised.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError

# Location of the 1-D minimum of -x*sin(sqrt|x|) on [-500, 500].
SCHWEFEL_ARGMIN = 420.96874635998194


@dataclass(frozen=True)
class GroupStructure:
    """A partition of ``range(dim)`` into disjoint, non-empty index blocks."""

    groups: tuple

    def __init__(self, groups, dim=None):
        blocks = tuple(tuple(int(i) for i in g) for g in groups)
        object.__setattr__(self, "groups", blocks)
        self.validate(dim)

    def validate(self, dim=None):
        seen = set()
        for g in self.groups:
            if len(g) == 0:
                raise ConfigurationError("empty group")
            for i in g:
                if i in seen:
                    raise ConfigurationError(f"index {i} appears in more than one group")
                seen.add(i)
        n = len(seen) if dim is None else dim
        if seen != set(range(n)):
            raise ConfigurationError("groups do not cover every dimension exactly once")

    @property
    def dim(self):
        return sum(len(g) for g in self.groups)

    def __len__(self):
        return len(self.groups)

    def __iter__(self):
        return iter(self.groups)

    def canonical(self):
        """Order-free form, for comparing partitions."""
        return frozenset(frozenset(g) for g in self.groups)

    def same_partition(self, other):
        return self.canonical() == other.canonical()


@dataclass
class ObjectiveFunction:
    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    fn: Callable[[np.ndarray], np.ndarray]
    f_opt: Optional[float] = None
    x_opt: Optional[np.ndarray] = None

    def __post_init__(self):
        self.lower = np.broadcast_to(np.asarray(self.lower, dtype=float), (self.dim,)).copy()
        self.upper = np.broadcast_to(np.asarray(self.upper, dtype=float), (self.dim,)).copy()
        if self.dim < 1:
            raise ConfigurationError("dim must be >= 1")
        if not np.all(self.lower < self.upper):
            raise ConfigurationError("every lower bound must be below its upper bound")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ConfigurationError(f"expected {self.dim} coordinates, got {x.shape[-1]}")
        if x.ndim == 1:
            return float(self.fn(x[None, :])[0])
        return np.asarray(self.fn(x), dtype=float)

    eval = __call__


class EvalCounter:
    """Thread-safe evaluation counter."""

    def __init__(self):
        self._lock = threading.Lock()
        self.count = 0

    def add(self, n):
        with self._lock:
            self.count += n


def counted(obj, counter):
    """Wrap ``obj`` so every evaluated point increments ``counter``."""

    def fn(x):
        counter.add(x.shape[0])
        return obj.fn(x)

    return ObjectiveFunction(obj.name, obj.dim, obj.lower, obj.upper, fn, obj.f_opt, obj.x_opt)


# --- classical functions (batched: x has shape (n, d)) ----------------------

def sphere(x):
    return np.sum(x * x, axis=-1)


def max_abs(x):
    return np.max(np.abs(x), axis=-1)


def step(x):
    return np.sum(np.floor(x + 0.5) ** 2, axis=-1)


def schwefel(x):
    return np.sum(-x * np.sin(np.sqrt(np.abs(x))), axis=-1)


def rastrigin(x):
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def ackley(x):
    n = x.shape[-1]
    a = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x, axis=-1) / n))
    b = -np.exp(np.sum(np.cos(2.0 * np.pi * x), axis=-1) / n)
    return a + b + 20.0 + np.e


def griewank(x):
    idx = np.sqrt(np.arange(1, x.shape[-1] + 1, dtype=float))
    return np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / idx), axis=-1) + 1.0


def rosenbrock(x):
    a, b = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (a * a - b) ** 2 + (a - 1.0) ** 2, axis=-1)


def schwefel_12(x):
    return np.sum(np.cumsum(x, axis=-1) ** 2, axis=-1)


# id -> (fn, bound, f_opt per dim, argmin coordinate)
_CLASSICAL = {
    "F1": (sphere, 100.0, 0.0, 0.0),
    "F4": (max_abs, 100.0, 0.0, 0.0),
    "F6": (step, 100.0, 0.0, 0.0),
    "F8": (schwefel, 500.0, -418.9829, SCHWEFEL_ARGMIN),
    "F9": (rastrigin, 5.12, 0.0, 0.0),
    "F10": (ackley, 32.0, 0.0, 0.0),
    "Griewank": (griewank, 600.0, 0.0, 0.0),
}
# Griewank is printed as F13 in one table and F11 in another.
ALIASES = {"F11": "Griewank", "F13": "Griewank"}
CLASSICAL_IDS = tuple(_CLASSICAL)


def make_classical(fid, dim):
    fid = ALIASES.get(fid, fid)
    if fid not in _CLASSICAL:
        raise ConfigurationError(f"unknown function id {fid!r}; choose from {', '.join(CLASSICAL_IDS)}")
    if dim < 1:
        raise ConfigurationError("dim must be >= 1")
    fn, bound, fopt_per_dim, argmin = _CLASSICAL[fid]
    f_opt = fopt_per_dim * dim if fopt_per_dim else 0.0
    return ObjectiveFunction(fid, dim, -bound, bound, fn, f_opt, np.full(dim, argmin))


# --- structured problems ----------------------------------------------------

CATEGORIES = ("fully-separable", "single-group", "ten-group", "twenty-group", "fully-nonseparable")
BASES = ("rastrigin", "ackley", "schwefel-1.2", "rosenbrock", "sphere")

_BLOCK_COUNT = {"fully-separable": 0, "single-group": 1, "ten-group": 10, "twenty-group": 20}

# Search box per base kind.  Rosenbrock uses its classic box: at [-100, 100]
# its terms reach 1e10 and rounding noise swamps the interaction threshold.
_BASE_BOUNDS = {
    "rastrigin": (-5.0, 5.0),
    "ackley": (-32.768, 32.768),
    "schwefel-1.2": (-100.0, 100.0),
    "rosenbrock": (-5.0, 10.0),
    "sphere": (-100.0, 100.0),
}


def _block_term(base):
    """Nonseparable block function of the shifted block variables ``z``."""
    if base == "rosenbrock":
        return lambda z: rosenbrock(z + 1.0)
    if base == "ackley":
        # Ackley's interaction signal is weak where its exponential term is
        # saturated; prefix sums in both directions give every variable many
        # coupled terms.
        return lambda z: ackley(np.concatenate(
            [np.cumsum(z, axis=-1), np.cumsum(z[..., ::-1], axis=-1)], axis=-1))
    inner = {"rastrigin": rastrigin, "ackley": ackley, "schwefel-1.2": sphere, "sphere": sphere}[base]
    # Prefix sums couple every pair of block variables; sphere of prefix
    # sums is exactly Schwefel 1.2.
    return lambda z: inner(np.cumsum(z, axis=-1))


def _tail_term(base):
    return rastrigin if base in ("rastrigin", "ackley") else sphere


@dataclass
class StructuredProblem:
    objective: ObjectiveFunction
    truth: GroupStructure
    category: str
    permutation: np.ndarray
    shift: np.ndarray
    base: str = "sphere"
    group_size: int = 1
    blocks: list = field(default_factory=list)


def make_structured(category, dim, group_size=None, base="sphere", seed=0):
    """Shifted, permuted composite with a known interaction partition.

    Variables are permuted, the first ``k * group_size`` permuted positions are
    cut into ``k`` coupled blocks (``k`` set by the category) and the rest form
    an additively separable tail.
    """
    if category not in CATEGORIES:
        raise ConfigurationError(f"unknown category {category!r}")
    if base not in BASES:
        raise ConfigurationError(f"unknown base function {base!r}")
    if dim < 1:
        raise ConfigurationError("dim must be >= 1")
    if category == "fully-nonseparable":
        group_size = dim if group_size is None else group_size
        if group_size != dim:
            raise ConfigurationError("fully-nonseparable requires group_size == dim")
        n_blocks = 1
    elif category == "fully-separable":
        group_size = 1 if group_size is None else group_size
        n_blocks = 0
    else:
        if group_size is None:
            raise ConfigurationError(f"{category} requires a group_size")
        n_blocks = _BLOCK_COUNT[category]
    if group_size < 1 or n_blocks * group_size > dim:
        raise ConfigurationError(f"{n_blocks} blocks of {group_size} do not fit in {dim} dimensions")
    if category == "twenty-group" and n_blocks * group_size != dim:
        raise ConfigurationError("twenty-group requires dim == 20 * group_size")
    if n_blocks and group_size < 2:
        raise ConfigurationError("nonseparable blocks need at least 2 variables")

    rng = np.random.default_rng(seed)
    lo, hi = _BASE_BOUNDS[base]
    perm = rng.permutation(dim)
    margin = 0.1 * (hi - lo)
    shift = rng.uniform(lo + margin, hi - margin, dim)

    blocks = [perm[b * group_size:(b + 1) * group_size] for b in range(n_blocks)]
    tail = perm[n_blocks * group_size:]
    block_fn = _block_term(base)
    tail_fn = _tail_term(base)

    def fn(x):
        z = x - shift
        total = np.zeros(x.shape[0])
        for idx in blocks:
            total = total + block_fn(z[:, idx])
        if tail.size:
            total = total + tail_fn(z[:, tail])
        return total

    truth = GroupStructure([sorted(b.tolist()) for b in blocks] + [[int(i)] for i in tail], dim)
    name = f"{category}/{base}"
    obj = ObjectiveFunction(name, dim, lo, hi, fn, 0.0, shift.copy())
    return StructuredProblem(obj, truth, category, perm, shift, base, group_size, blocks)


def optimum_info(obj):
    """``(x_opt, f_opt)`` as known to the objective; either may be ``None``."""
    if isinstance(obj, StructuredProblem):
        obj = obj.objective
    x = None if obj.x_opt is None else obj.x_opt.copy()
    return x, obj.f_opt
