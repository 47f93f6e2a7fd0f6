import dataclasses

import numpy as np
import pytest

from foragesim.config import (
    FIELD_NAMES,
    SimConfig,
    config_hash,
    dumps_config,
    load_config,
    parse_config,
)
from foragesim.errors import ConfigParseError, ConfigValidationError


def test_minimal_config_fills_defaults():
    cfg = parse_config("dt = 0.1\nmax_agents = 4\n")
    assert cfg.dt == 0.1
    assert cfg.max_agents == 4
    assert cfg.init_agents == 4  # defaults to capacity
    assert cfg.n_neurons == 50
    assert cfg.boundary_mode == "periodic"


def test_dt_zero_rejected_naming_field():
    with pytest.raises(ConfigValidationError) as exc:
        parse_config("dt = 0.0\n")
    assert exc.value.field == "dt"
    assert "dt" in str(exc.value)


@pytest.mark.parametrize(
    "text,field",
    [
        ("alpha = -1.0", "alpha"),
        ("alpha = 0", "alpha"),
        ("harvest_efficiency = 1.5", "harvest_efficiency"),
        ("offspring_energy_fraction = 1.0", "offspring_energy_fraction"),
        ("max_agents = 0", "max_agents"),
        ("n_steps = -1", "n_steps"),
        ("boundary_mode = \"outer_space\"", "boundary_mode"),
        ("overflow_policy = \"shrug\"", "overflow_policy"),
        ("world_extent = [0.0, 10.0]", "world_extent"),
        ("kernel_scale = 0.0", "kernel_scale"),
        ("tau = 0.0", "tau"),
        ("seed = -3", "seed"),
        ("init_agents = 9\nmax_agents = 4", "init_agents"),
    ],
)
def test_invariant_violations_name_the_field(text, field):
    with pytest.raises(ConfigValidationError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_unknown_key_rejected():
    with pytest.raises(ConfigValidationError) as exc:
        parse_config("dt = 0.1\nwarp_factor = 9\n")
    assert exc.value.field == "warp_factor"


def test_malformed_text_is_parse_error():
    with pytest.raises(ConfigParseError):
        parse_config("dt = = 0.1\n")


def test_type_mismatches_rejected():
    with pytest.raises(ConfigValidationError):
        parse_config("max_agents = 2.5\n")
    with pytest.raises(ConfigValidationError):
        parse_config("dt = \"fast\"\n")
    with pytest.raises(ConfigValidationError):
        parse_config("dt = true\n")
    with pytest.raises(ConfigValidationError):
        parse_config("world_extent = [1.0, 2.0, 3.0]\n")


def test_int_literal_accepted_for_float_field():
    cfg = parse_config("dt = 1\n")
    assert cfg.dt == 1.0 and isinstance(cfg.dt, float)


def _random_valid_config(rng) -> SimConfig:
    max_agents = int(rng.integers(1, 50))
    max_resources = int(rng.integers(1, 50))
    return SimConfig(
        dt=float(rng.uniform(1e-3, 1.0)),
        n_steps=int(rng.integers(0, 5000)),
        world_extent=(float(rng.uniform(1, 500)), float(rng.uniform(1, 500))),
        boundary_mode=str(rng.choice(["periodic", "reflective", "clamped"])),
        max_agents=max_agents,
        max_resources=max_resources,
        init_agents=int(rng.integers(0, max_agents + 1)),
        init_resources=int(rng.integers(0, max_resources + 1)),
        n_neurons=int(rng.integers(1, 40)),
        n_rays=int(rng.integers(1, 16)),
        ray_max_range=float(rng.uniform(0.1, 50)),
        epsilon=float(rng.uniform(0, 2)),
        alpha=float(rng.uniform(1e-4, 1.0)),
        kernel_gain=float(rng.uniform(0, 3)),
        kernel_scale=float(rng.uniform(1e-2, 10)),
        kernel_cutoff=float(rng.uniform(0, 20)),
        harvest_efficiency=float(rng.uniform(0, 1)),
        metabolic_cost=float(rng.uniform(0, 1)),
        move_cost=float(rng.uniform(0, 1)),
        init_energy=float(rng.uniform(0, 20)),
        reproduce_threshold=float(rng.uniform(1e-2, 50)),
        offspring_energy_fraction=float(rng.uniform(0.01, 0.99)),
        mutation_std=float(rng.uniform(0, 1)),
        tau=float(rng.uniform(1e-2, 5)),
        policy_gain=float(rng.uniform(0, 3)),
        max_speed=float(rng.uniform(0, 10)),
        seed=int(rng.integers(0, 2**63)),
        overflow_policy=str(rng.choice(["strict", "drop_and_count"])),
    )


def test_round_trip_bit_exact_over_random_configs(rng):
    # serialize -> parse must reproduce every field bit-for-bit
    for _ in range(100):
        cfg = _random_valid_config(rng)
        back = parse_config(dumps_config(cfg))
        for f in dataclasses.fields(SimConfig):
            a, b = getattr(cfg, f.name), getattr(back, f.name)
            assert a == b, f"{f.name}: {a!r} != {b!r}"
            if isinstance(a, float):
                assert np.float64(a).tobytes() == np.float64(b).tobytes()
        assert config_hash(cfg) == config_hash(back)


def test_load_config_reads_files(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("dt = 0.25\nseed = 99\n")
    cfg = load_config(path)
    assert cfg.dt == 0.25 and cfg.seed == 99


def test_effective_dump_contains_every_field():
    text = dumps_config(SimConfig())
    for name in FIELD_NAMES:
        assert name in text


def test_replace_revalidates():
    cfg = SimConfig()
    with pytest.raises(ConfigValidationError):
        cfg.replace(dt=-1.0)
