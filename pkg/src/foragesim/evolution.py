"""Gradient-free parameter adaptation.

Two routes, both over the flat policy parameter vector:

* continual: `step_population` applies the birth/death rules inside a
  running scenario — agents at or below zero energy are removed, agents at
  or above the reproduction threshold spawn one mutated offspring and
  split their energy with it.
* offline: `es_train` runs mirrored-sampling evolution strategies with
  rank-normalized weights, so the mean update is invariant under any
  strictly monotone transformation of fitness.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np

from . import agentset
from .config import SimConfig
from .errors import CapacityError, NumericalError

if TYPE_CHECKING:
    from .state import AgentSet


@dataclass(frozen=True)
class EvolutionConfig:
    """Knobs for both the continual rules and the offline ES trainer."""

    mutation_std: float = 0.05
    reproduce_threshold: float = 10.0
    offspring_energy_fraction: float = 0.5
    es_pop_size: int = 40
    es_generations: int = 600
    es_sigma: float = 0.1
    es_learning_rate: float = 0.05

    def __post_init__(self):
        if not (self.mutation_std >= 0 and math.isfinite(self.mutation_std)):
            raise ValueError("mutation_std must be finite and >= 0")
        if self.reproduce_threshold <= 0:
            raise ValueError("reproduce_threshold must be > 0")
        if not 0 < self.offspring_energy_fraction < 1:
            raise ValueError("offspring_energy_fraction must be in (0, 1)")
        if self.es_pop_size < 2 or self.es_pop_size % 2:
            raise ValueError("es_pop_size must be even and >= 2 (mirrored sampling)")
        if self.es_generations < 0:
            raise ValueError("es_generations must be >= 0")
        if not (self.es_sigma >= 0 and math.isfinite(self.es_sigma)):
            raise ValueError("es_sigma must be finite and >= 0")
        if self.es_learning_rate <= 0:
            raise ValueError("es_learning_rate must be > 0")


@dataclass(frozen=True)
class PopulationReport:
    births: int
    deaths: int
    dropped: int


def mutate(
    params: np.ndarray,
    std: float,
    rng: np.random.Generator,
    tau_index: int | None = None,
    tau_floor: float = 0.0,
) -> np.ndarray:
    """params + std * xi with xi i.i.d. standard normal; tau clamped to >= tau_floor.

    Works on a single vector or a batch of rows. The clamp keeps mutated
    time constants at or above the integration step, which keeps the leaky
    update a convex combination and the policy bounded.
    """
    if std < 0:
        raise ValueError("std must be >= 0")
    params = np.asarray(params, dtype=float)
    out = params + std * rng.standard_normal(params.shape)
    if tau_index is not None:
        out[..., tau_index] = np.maximum(out[..., tau_index], tau_floor)
    return out


def step_population(
    agents: "AgentSet", config: SimConfig, rng: np.random.Generator
) -> tuple["AgentSet", PopulationReport]:
    """Apply the death rule, then the birth rule, preserving total energy.

    Deaths: active agents with energy <= 0 are removed. Births: each agent
    with energy >= reproduce_threshold spawns one offspring at its own
    position with zero velocity, zero policy state, and mutated parameters;
    the offspring takes offspring_energy_fraction of the parent's energy.

    Drop accounting keeps determinism cheap: only the first min(k, free)
    would-be parents in slot order actually spawn (that is exactly the
    prefix add() would keep), so mutation noise is drawn only for them and
    parents of dropped offspring keep their full energy. A fully dropped
    batch is a pure overflow-counter bump.
    """
    dead = agents.active & (agents.energy <= 0.0)
    deaths = int(dead.sum())
    aset = agentset.remove(agents, dead)

    parent_mask = aset.active & (aset.energy >= config.reproduce_threshold)
    pidx = np.flatnonzero(parent_mask)
    k = len(pidx)
    if k == 0:
        return aset, PopulationReport(births=0, deaths=deaths, dropped=0)

    free = aset.capacity - aset.active_count
    if k > free and config.overflow_policy == "strict":
        raise CapacityError(f"{k} births exceed free capacity {free} (strict mode)")
    accepted = min(k, free)
    if accepted == 0:
        aset = aset.replace(overflow_count=aset.overflow_count + k)
        return aset, PopulationReport(births=0, deaths=deaths, dropped=k)

    kept = pidx[:accepted]
    # tau is the last entry of the flat parameter layout
    child_params = mutate(
        aset.params[kept], config.mutation_std, rng,
        tau_index=aset.params.shape[1] - 1, tau_floor=config.dt,
    )
    child_energy = config.offspring_energy_fraction * aset.energy[kept]

    energy = aset.energy.copy()
    energy[kept] = energy[kept] - child_energy
    aset = aset.replace(energy=energy)

    batch = agentset.SpawnBatch.pack(
        position=aset.position[kept],
        velocity=np.zeros((accepted, 2)),
        energy=child_energy,
        rates=np.zeros((accepted, aset.rates.shape[1])),
        params=child_params,
    )
    aset, placed = agentset.add(aset, batch, config.overflow_policy)
    dropped = k - placed
    if dropped:
        aset = aset.replace(overflow_count=aset.overflow_count + dropped)
    return aset, PopulationReport(births=placed, deaths=deaths, dropped=dropped)


def centered_ranks(values: np.ndarray) -> np.ndarray:
    """Fitness ranks mapped to [-0.5, 0.5]; ties keep index order (stable)."""
    n = len(values)
    ranks = np.empty(n)
    ranks[np.argsort(values, kind="stable")] = np.arange(n, dtype=float)
    return ranks / (n - 1) - 0.5


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_ever: float


@dataclass(frozen=True)
class EsResult:
    best_params: np.ndarray
    best_fitness: float
    mean: np.ndarray
    history: list


def es_train(
    objective: Callable[[np.ndarray], float],
    init_mean: np.ndarray,
    config: EvolutionConfig,
    rng: np.random.Generator,
) -> EsResult:
    """Mirrored-sampling ES on a flat parameter vector, maximizing `objective`.

    Per generation: draw pop/2 perturbations, evaluate mean +/- sigma*eps in
    perturbation-index order (all + then all -), rank-normalize the
    fitnesses, and move the mean along the score-weighted estimate
    lr/(pop*sigma) * sum_j w_j (x_j - mean). With sigma = 0 all candidates
    coincide with the mean and carry no information, so the update is zero.
    """
    mean = np.array(init_mean, dtype=float)
    dim = mean.shape[0]
    half = config.es_pop_size // 2
    pop = config.es_pop_size
    sigma, lr = config.es_sigma, config.es_learning_rate

    best_params = mean.copy()
    best_fitness = -np.inf
    history: list[GenerationRecord] = []

    for gen in range(config.es_generations):
        eps = rng.standard_normal((half, dim))
        signed = np.concatenate([eps, -eps], axis=0)
        candidates = mean[None, :] + sigma * signed
        fitness = np.array([objective(c) for c in candidates], dtype=float)
        if not np.isfinite(fitness).all():
            bad = int(np.flatnonzero(~np.isfinite(fitness))[0])
            raise NumericalError(
                f"non-finite fitness at generation {gen} (candidate {bad})", step=gen
            )

        gen_best = int(np.argmax(fitness))
        if fitness[gen_best] > best_fitness:
            best_fitness = float(fitness[gen_best])
            best_params = candidates[gen_best].copy()

        if sigma > 0:
            weights = centered_ranks(fitness)
            grad = signed.T @ weights / (pop * sigma)
            mean = mean + lr * grad

        history.append(
            GenerationRecord(
                generation=gen,
                best_fitness=float(fitness[gen_best]),
                mean_fitness=float(fitness.mean()),
                best_ever=best_fitness,
            )
        )

    return EsResult(best_params=best_params, best_fitness=best_fitness, mean=mean, history=history)


FITNESS_COLUMNS = ("generation", "best_fitness", "mean_fitness", "best_ever")


def write_fitness_history(path, history) -> None:
    """Columnar (CSV) dump of per-generation fitness records."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FITNESS_COLUMNS)
        for rec in history:
            writer.writerow(
                [rec.generation, repr(rec.best_fitness), repr(rec.mean_fitness), repr(rec.best_ever)]
            )
