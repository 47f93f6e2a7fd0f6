#!/usr/bin/env python3
"""Offline ES experiment: evolve one shared policy for a small foraging scenario.

The fitness of a candidate parameter vector is the total energy a frozen
population (no births or deaths) harvests over a short fixed-seed run when
every agent shares those parameters. Writes the per-generation fitness
history as CSV and prints the best fitness found.

Example:
    python scripts/train_es.py --generations 20 --out es_history.csv
"""

import argparse
import dataclasses

import numpy as np

from foragesim import SimConfig
from foragesim.engine import init_state, step
from foragesim.evolution import EvolutionConfig, es_train, write_fitness_history
from foragesim.policy import init_params
from foragesim.state import policy_layout


def scenario(seed: int) -> SimConfig:
    return SimConfig(
        dt=0.1,
        max_agents=12,
        init_agents=12,
        max_resources=10,
        init_resources=10,
        n_neurons=8,
        n_rays=4,
        world_extent=(20.0, 20.0),
        kernel_cutoff=4.0,
        metabolic_cost=0.0,
        move_cost=0.0,
        reproduce_threshold=1e9,  # freeze the population: pure harvesting fitness
        seed=seed,
    )


def make_objective(cfg: SimConfig, n_steps: int):
    base = init_state(cfg)

    def fitness(theta: np.ndarray) -> float:
        shared = np.where(
            base.agents.active[:, None],
            np.broadcast_to(theta, base.agents.params.shape),
            0.0,
        )
        state = dataclasses.replace(base, agents=base.agents.replace(params=shared))
        for _ in range(n_steps):
            state, _ = step(state, cfg)
        return state.stats.energy_from_harvest

    return fitness


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--generations", type=int, default=15)
    parser.add_argument("--pop-size", type=int, default=16)
    parser.add_argument("--sigma", type=float, default=0.1)
    parser.add_argument("--learning-rate", type=float, default=0.05)
    parser.add_argument("--episode-steps", type=int, default=80)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", default="es_history.csv")
    args = parser.parse_args()

    cfg = scenario(args.seed)
    es_cfg = EvolutionConfig(
        es_pop_size=args.pop_size,
        es_generations=args.generations,
        es_sigma=args.sigma,
        es_learning_rate=args.learning_rate,
    )
    layout = policy_layout(cfg)
    rng = np.random.default_rng(args.seed)
    theta0 = init_params(rng, layout, gain=cfg.policy_gain, tau=cfg.tau)

    objective = make_objective(cfg, args.episode_steps)
    print(f"baseline fitness (random policy): {objective(theta0):.3f}")
    result = es_train(objective, theta0, es_cfg, rng)
    print(f"best fitness after {args.generations} generations: {result.best_fitness:.3f}")
    write_fitness_history(args.out, result.history)
    print(f"history written to {args.out}")


if __name__ == "__main__":
    main()
