"""Standard Gravitational Search Algorithm (minimisation)."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, NumericFailureError, NumericInputError

TraceSink = Callable[[int, float], None]


@dataclass(frozen=True)
class GsaParams:
    pop_size: int = 50
    max_iter: int = 500
    G0: float = 100.0
    alpha: float = 20.0
    epsilon_force: float = 1e-10
    kbest_final: int = 1

    def __post_init__(self):
        if self.pop_size < 2:
            raise ConfigurationError("pop_size must be >= 2")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be >= 1")
        if not 1 <= self.kbest_final <= self.pop_size:
            raise ConfigurationError("kbest_final must lie in [1, pop_size]")
        if self.G0 <= 0 or self.alpha <= 0 or self.epsilon_force <= 0:
            raise ConfigurationError("G0, alpha and epsilon_force must be positive")


@dataclass
class Swarm:
    positions: np.ndarray
    velocities: np.ndarray
    fitnesses: np.ndarray
    masses: np.ndarray

    @property
    def size(self):
        return self.positions.shape[0]


@dataclass(frozen=True)
class StepOutcome:
    best_index: int
    best_fitness: float
    evaluations_used: int


def compute_masses(fitnesses):
    """Normalised masses: the best (lowest) fitness gets the largest mass.

    When every fitness is equal the masses are uniform.
    """
    fit = np.asarray(fitnesses, dtype=float)
    if fit.size == 0:
        raise ConfigurationError("need at least one fitness value")
    if not np.all(np.isfinite(fit)):
        raise NumericInputError("fitness values must be finite")
    best, worst = fit.min(), fit.max()
    if best == worst:
        return np.full(fit.size, 1.0 / fit.size)
    q = (fit - worst) / (best - worst)
    return q / q.sum()


def gravitational_constant(t, t_max, G0=100.0, alpha=20.0):
    return G0 * math.exp(-alpha * t / t_max)


def kbest_size(t, t_max, N, kbest_final=1):
    k = N + (kbest_final - N) * t / t_max
    k = math.floor(k + 0.5)
    return int(min(max(k, kbest_final), N))


def kbest_members(fitnesses, k):
    """Indices of the ``k`` fittest agents; ties go to the lower index."""
    return np.argsort(fitnesses, kind="stable")[:k]


def accelerations(positions, masses, members, G, eps, rand):
    """Acceleration of every agent towards the ``members`` set.

    The agent's own mass appears in both the force and the divisor and is
    cancelled analytically, so zero-mass agents still accelerate.  ``rand``
    has shape ``(N, len(members), d)`` and scales each pairwise component.
    """
    xj = positions[members]                              # (K, d)
    diff = xj[None, :, :] - positions[:, None, :]         # (N, K, d)
    dist = np.sqrt(np.sum(diff * diff, axis=-1))          # (N, K)
    coef = G * masses[members][None, :] / (dist + eps)
    coef[members, np.arange(len(members))] = 0.0          # j != i
    return np.einsum("nk,nkd->nd", coef, rand * diff)


def forces(positions, masses, members, G, eps, rand):
    """Total gravitational force on every agent (acceleration times mass)."""
    return masses[:, None] * accelerations(positions, masses, members, G, eps, rand)


def clamp(positions, velocities, lower, upper):
    """Clamp to the box and zero the velocity of every clamped coordinate."""
    out = (positions < lower) | (positions > upper)
    if out.any():
        positions = np.clip(positions, lower, upper)
        velocities = np.where(out, 0.0, velocities)
    return positions, velocities


def step(swarm, obj, params, t, rng, t_max=None):
    """Advance the swarm one iteration and re-evaluate it.

    ``t_max`` overrides ``params.max_iter`` as the schedule horizon.
    """
    horizon = params.max_iter if t_max is None else t_max
    N, d = swarm.positions.shape
    G = gravitational_constant(t, horizon, params.G0, params.alpha)
    members = kbest_members(swarm.fitnesses, kbest_size(t, horizon, N, params.kbest_final))

    acc = accelerations(swarm.positions, swarm.masses, members, G, params.epsilon_force,
                        rng.random((N, len(members), d)))
    vel = rng.random((N, d)) * swarm.velocities + acc
    pos = swarm.positions + vel

    bad = ~np.isfinite(pos)
    if bad.any():
        i, k = np.argwhere(bad)[0]
        raise NumericFailureError(int(i), int(k), float(pos[i, k]))
    pos, vel = clamp(pos, vel, obj.lower, obj.upper)

    fit = np.asarray(obj(pos), dtype=float)
    new = Swarm(pos, vel, fit, compute_masses(fit))
    b = int(np.argmin(fit))
    return new, StepOutcome(b, float(fit[b]), N)


def init_swarm(obj, positions):
    positions = np.array(positions, dtype=float)
    fit = np.asarray(obj(positions), dtype=float)
    return Swarm(positions, np.zeros_like(positions), fit, compute_masses(fit))


@dataclass
class GsaResult:
    best_position: np.ndarray
    best_fitness: float
    evaluations: int
    swarm: Swarm
    iterations: int


def optimize(obj, params, positions, budget, rng, trace=None, evals_offset=0, max_iter=None):
    """Run GSA from the given initial positions.

    Stops after ``max_iter`` steps (default ``params.max_iter``) or when the
    budget cannot cover another full step.  ``evals_offset`` is added to the
    evaluation counts reported to ``trace``.
    """
    N = params.pop_size
    if positions.shape[0] != N:
        raise ConfigurationError(f"expected {N} initial agents, got {positions.shape[0]}")
    if budget < N:
        raise ConfigurationError(f"budget {budget} cannot cover the initial population of {N}")
    iters = params.max_iter if max_iter is None else max_iter

    swarm = init_swarm(obj, positions)
    used = N
    b = int(np.argmin(swarm.fitnesses))
    best_x, best_f = swarm.positions[b].copy(), float(swarm.fitnesses[b])
    if trace is not None:
        trace(evals_offset + used, best_f)

    done = 0
    for t in range(iters):
        if used + N > budget:
            break
        swarm, out = step(swarm, obj, params, t, rng, t_max=iters)
        used += out.evaluations_used
        done += 1
        if out.best_fitness < best_f:
            best_f = out.best_fitness
            best_x = swarm.positions[out.best_index].copy()
        if trace is not None:
            trace(evals_offset + used, best_f)
    return GsaResult(best_x, best_f, used, swarm, done)


def run_gsa(obj, params, budget=None, rng=None, trace=None):
    """Plain GSA on ``obj``: uniform initialisation, zero velocities.

    Returns ``(best_position, best_fitness, evaluations_used)``.
    """
    N = params.pop_size
    if budget is None:
        budget = N * (params.max_iter + 1)
    if budget < N:
        raise ConfigurationError(f"budget {budget} is smaller than the population size {N}")
    rng = np.random.default_rng(rng)
    x0 = rng.uniform(obj.lower, obj.upper, (N, obj.dim))
    res = optimize(obj, params, x0, budget, rng, trace)
    return res.best_position, res.best_fitness, res.evaluations


def with_iterations(params, max_iter):
    return replace(params, max_iter=max_iter)
