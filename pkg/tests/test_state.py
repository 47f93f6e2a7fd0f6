import numpy as np
import pytest

from foragesim.checkpoint import dump_state_bytes
from foragesim.config import SimConfig
from foragesim.engine import init_state
from foragesim.state import AgentSet, WorldGeometry, policy_layout, state_init


def small_config(**kw):
    base = dict(max_agents=8, max_resources=4, n_neurons=5, n_rays=4, seed=11)
    base.update(kw)
    return SimConfig(**base)


def test_empty_population_all_zero():
    cfg = small_config(init_agents=0)
    agents, resources, world = state_init(cfg)
    assert agents.active_count == 0
    for name in ("uid", "position", "velocity", "energy", "rates", "params"):
        assert not np.any(getattr(agents, name))
    assert agents.next_uid == 1


def test_single_resource_starts_at_carrying_capacity():
    cfg = small_config(init_resources=1, epsilon=0.5, alpha=0.005)
    _, resources, _ = state_init(cfg)
    assert resources.active_count == 1
    assert resources.value[0] == 100.0  # epsilon/alpha exactly


def test_init_fields():
    cfg = small_config(init_agents=5, init_energy=3.5)
    agents, resources, world = state_init(cfg)
    assert agents.active_count == 5
    assert list(agents.uid[:5]) == [1, 2, 3, 4, 5]
    assert agents.next_uid == 6
    ext = np.asarray(cfg.world_extent)
    assert np.all(agents.position[:5] >= 0) and np.all(agents.position[:5] < ext)
    assert not np.any(agents.velocity)
    assert np.all(agents.energy[:5] == 3.5)
    assert not np.any(agents.rates)
    # zero padding beyond the live block
    assert not np.any(agents.params[5:])
    assert not np.any(agents.uid[5:])


def test_state_init_is_pure_function_of_config():
    cfg = small_config(seed=123)
    s1 = init_state(cfg)
    s2 = init_state(cfg)
    assert dump_state_bytes(s1, cfg) == dump_state_bytes(s2, cfg)


def test_different_seeds_differ():
    a = init_state(small_config(seed=1))
    b = init_state(small_config(seed=2))
    assert not np.array_equal(a.agents.position, b.agents.position)


def test_param_dim_matches_layout():
    cfg = small_config()
    agents, _, _ = state_init(cfg)
    assert agents.params.shape == (cfg.max_agents, policy_layout(cfg).size)


def test_world_geometry_validation():
    with pytest.raises(ValueError):
        WorldGeometry(extent=(10.0, 10.0), boundary_mode="periodic",
                      walls=[[[1.0, 1.0], [1.0, 1.0]]])
    with pytest.raises(ValueError):
        WorldGeometry(extent=(10.0, 10.0), boundary_mode="periodic",
                      walls=[[[0.0, 0.0], [np.inf, 1.0]]])
    w = WorldGeometry(extent=(10.0, 10.0), boundary_mode="reflective",
                      walls=[[[1.0, 1.0], [2.0, 2.0]]])
    assert w.walls.shape == (1, 2, 2)
    assert w.periodic_extent is None


def test_agentset_empty_shapes():
    s = AgentSet.empty(7, 3, 21)
    assert s.shape_signature() == ((7,), (7,), (7, 2), (7, 2), (7,), (7, 3), (7, 21))
    assert s.capacity == 7 and s.active_count == 0
