"""Deterministic, vectorized multi-agent foraging simulation engine.

Agents with recurrent rate-network policies forage resources governed by
logistic growth-decay dynamics, inside constant-shape, zero-padded array
storage so populations can grow and shrink without any reallocation.
"""

__version__ = "0.1.0"

from .config import SimConfig, dumps_config, load_config, parse_config, save_config
from .engine import (
    BenchReport,
    SimState,
    SimStats,
    StepRecord,
    audit_state,
    bench,
    init_state,
    run,
    step,
)
from .evolution import EvolutionConfig, es_train, mutate, step_population
from .state import AgentSet, ResourceSet, WorldGeometry, state_init

__all__ = [
    "AgentSet",
    "BenchReport",
    "EvolutionConfig",
    "ResourceSet",
    "SimConfig",
    "SimState",
    "SimStats",
    "StepRecord",
    "WorldGeometry",
    "audit_state",
    "bench",
    "dumps_config",
    "es_train",
    "init_state",
    "load_config",
    "mutate",
    "parse_config",
    "run",
    "save_config",
    "state_init",
    "step",
    "step_population",
    "__version__",
]
