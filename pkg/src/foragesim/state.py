"""Constant-shape, zero-padded storage for agents, resources, and the world.

Every array's shape is fixed when the set is constructed and no operation
in the package ever changes it. Absent agents are represented as all-zero
slots (uid 0 is reserved for "no agent"), so vectorized kernels can run
over the full capacity unconditionally. Sets are immutable snapshots:
operations return new sets sharing untouched arrays.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import rng
from .config import OUT_DIM, SimConfig
from .errors import ConfigValidationError
from .geometry import as_segment_array
from .policy import PolicyLayout, init_params
from .sensors import observation_dim


@dataclass(frozen=True)
class AgentSet:
    """All per-agent state and parameters, one slot per row.

    active: (M,) bool; uid: (M,) uint64, 0 on inactive slots;
    position/velocity: (M, 2); energy: (M,); rates: (M, n_neurons) policy
    state; params: (M, P) flattened policy parameters.
    """

    active: np.ndarray
    uid: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    energy: np.ndarray
    rates: np.ndarray
    params: np.ndarray
    next_uid: int = 1
    overflow_count: int = 0

    @classmethod
    def empty(cls, capacity: int, n_neurons: int, param_dim: int) -> "AgentSet":
        return cls(
            active=np.zeros(capacity, dtype=bool),
            uid=np.zeros(capacity, dtype=np.uint64),
            position=np.zeros((capacity, 2)),
            velocity=np.zeros((capacity, 2)),
            energy=np.zeros(capacity),
            rates=np.zeros((capacity, n_neurons)),
            params=np.zeros((capacity, param_dim)),
        )

    @property
    def capacity(self) -> int:
        return self.active.shape[0]

    @property
    def active_count(self) -> int:
        return int(self.active.sum())

    @property
    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.active)

    def replace(self, **changes) -> "AgentSet":
        return dataclasses.replace(self, **changes)

    def shape_signature(self) -> tuple:
        return (
            self.active.shape,
            self.uid.shape,
            self.position.shape,
            self.velocity.shape,
            self.energy.shape,
            self.rates.shape,
            self.params.shape,
        )


@dataclass(frozen=True)
class ResourceSet:
    """Resource positions and values, one slot per row; inactive slots all-zero."""

    active: np.ndarray
    position: np.ndarray
    value: np.ndarray

    @classmethod
    def empty(cls, capacity: int) -> "ResourceSet":
        return cls(
            active=np.zeros(capacity, dtype=bool),
            position=np.zeros((capacity, 2)),
            value=np.zeros(capacity),
        )

    @property
    def capacity(self) -> int:
        return self.active.shape[0]

    @property
    def active_count(self) -> int:
        return int(self.active.sum())

    def replace(self, **changes) -> "ResourceSet":
        return dataclasses.replace(self, **changes)

    def shape_signature(self) -> tuple:
        return (self.active.shape, self.position.shape, self.value.shape)


@dataclass(frozen=True)
class WorldGeometry:
    """Wall segments plus the boundary rule; extent mirrors the config."""

    extent: tuple[float, float]
    boundary_mode: str
    walls: np.ndarray  # (W, 2, 2) segment endpoints

    def __post_init__(self):
        object.__setattr__(self, "walls", as_segment_array(self.walls))
        if self.walls.size:
            if not np.isfinite(self.walls).all():
                raise ValueError("wall endpoints must be finite")
            if (self.walls[:, 0] == self.walls[:, 1]).all(axis=1).any():
                raise ValueError("wall segments must have distinct endpoints")

    @property
    def periodic_extent(self):
        """Extent to use for minimum-image metrics, None unless periodic."""
        return self.extent if self.boundary_mode == "periodic" else None


def policy_layout(config: SimConfig) -> PolicyLayout:
    return PolicyLayout(
        n_neurons=config.n_neurons,
        obs_dim=observation_dim(config.n_rays),
        out_dim=OUT_DIM,
    )


def state_init(config: SimConfig, walls=None) -> tuple[AgentSet, ResourceSet, WorldGeometry]:
    """Build the initial scenario state; a pure function of (config, walls).

    Agents start uniformly placed with zero velocity, full init_energy, and
    randomly initialized policy parameters. Resources start uniform with
    the agent-free equilibrium value epsilon/alpha. Remaining slots are
    zero-padded.
    """
    world = WorldGeometry(
        extent=config.world_extent, boundary_mode=config.boundary_mode, walls=walls
    )
    layout = policy_layout(config)
    agents = AgentSet.empty(config.max_agents, config.n_neurons, layout.size)
    m0 = config.init_agents
    if m0 > config.max_agents:
        raise ConfigValidationError("init_agents", "exceeds max_agents")
    if m0 > 0:
        ext = np.asarray(config.world_extent)
        pos_stream = rng.stream(config.seed, -1, rng.PHASE_INIT_AGENTS)
        positions = pos_stream.uniform(size=(m0, 2)) * ext
        param_stream = rng.stream(config.seed, -1, rng.PHASE_INIT_PARAMS)
        params = init_params(
            param_stream, layout, gain=config.policy_gain, tau=config.tau, size=m0
        )
        active = agents.active.copy()
        uid = agents.uid.copy()
        position = agents.position.copy()
        energy = agents.energy.copy()
        all_params = agents.params.copy()
        active[:m0] = True
        uid[:m0] = np.arange(1, m0 + 1, dtype=np.uint64)
        position[:m0] = positions
        energy[:m0] = config.init_energy
        all_params[:m0] = params
        agents = agents.replace(
            active=active,
            uid=uid,
            position=position,
            energy=energy,
            params=all_params,
            next_uid=m0 + 1,
        )

    resources = ResourceSet.empty(config.max_resources)
    n0 = config.init_resources
    if n0 > 0:
        ext = np.asarray(config.world_extent)
        res_stream = rng.stream(config.seed, -1, rng.PHASE_INIT_RESOURCES)
        r_active = resources.active.copy()
        r_pos = resources.position.copy()
        r_val = resources.value.copy()
        r_active[:n0] = True
        r_pos[:n0] = res_stream.uniform(size=(n0, 2)) * ext
        r_val[:n0] = config.epsilon / config.alpha
        resources = resources.replace(active=r_active, position=r_pos, value=r_val)

    return agents, resources, world
