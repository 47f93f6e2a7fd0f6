"""Versioned binary checkpoints: the bit-exact serialization of a SimState.

Layout (all little-endian):

    bytes 0..8    magic b"FSIMCKPT"
    u32           format version (currently 1)
    u32           header length H
    H bytes       header JSON (sorted keys): config dict, step, next_uid,
                  overflow_count, births, deaths, total_extracted,
                  energy_from_harvest, n_walls, config_sha256
    arrays, raw C-order bytes, in this fixed order:
        agents.active   u1 (M,)        agents.uid      u8 (M,)
        agents.position f8 (M,2)       agents.velocity f8 (M,2)
        agents.energy   f8 (M,)        agents.rates    f8 (M,n)
        agents.params   f8 (M,P)       resources.active u1 (N,)
        resources.position f8 (N,2)    resources.value f8 (N,)
        walls           f8 (W,2,2)

Shapes come from the embedded config (plus n_walls), so the byte stream
needs no per-array framing. Identical states serialize to identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .config import SimConfig, config_hash
from .errors import CheckpointError

MAGIC = b"FSIMCKPT"
FORMAT_VERSION = 1


def _array_bytes(arr: np.ndarray, dtype: str) -> bytes:
    return np.ascontiguousarray(arr, dtype=dtype).tobytes()


def dump_state_bytes(state, config: SimConfig) -> bytes:
    header = {
        "config": config.to_dict(),
        "config_sha256": config_hash(config),
        "step": state.step,
        "next_uid": state.agents.next_uid,
        "overflow_count": state.agents.overflow_count,
        "births": state.stats.births,
        "deaths": state.stats.deaths,
        "total_extracted": state.stats.total_extracted,
        "energy_from_harvest": state.stats.energy_from_harvest,
        "n_walls": int(state.world.walls.shape[0]),
    }
    header_json = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    parts = [
        MAGIC,
        struct.pack("<II", FORMAT_VERSION, len(header_json)),
        header_json,
        _array_bytes(state.agents.active, "<u1"),
        _array_bytes(state.agents.uid, "<u8"),
        _array_bytes(state.agents.position, "<f8"),
        _array_bytes(state.agents.velocity, "<f8"),
        _array_bytes(state.agents.energy, "<f8"),
        _array_bytes(state.agents.rates, "<f8"),
        _array_bytes(state.agents.params, "<f8"),
        _array_bytes(state.resources.active, "<u1"),
        _array_bytes(state.resources.position, "<f8"),
        _array_bytes(state.resources.value, "<f8"),
        _array_bytes(state.world.walls, "<f8"),
    ]
    return b"".join(parts)


def save_checkpoint(path, state, config: SimConfig) -> None:
    Path(path).write_bytes(dump_state_bytes(state, config))


class _Reader:
    def __init__(self, buf: bytes, offset: int):
        self.buf = buf
        self.offset = offset

    def take(self, shape, dtype: str) -> np.ndarray:
        count = int(np.prod(shape)) if shape else 1
        itemsize = np.dtype(dtype).itemsize
        end = self.offset + count * itemsize
        if end > len(self.buf):
            raise CheckpointError("truncated checkpoint: array data missing")
        arr = np.frombuffer(self.buf[self.offset : end], dtype=dtype).reshape(shape).copy()
        self.offset = end
        return arr


def load_checkpoint(path):
    """Read a checkpoint -> (SimState, SimConfig)."""
    from .engine import SimState, SimStats
    from .state import AgentSet, ResourceSet, WorldGeometry, policy_layout

    buf = Path(path).read_bytes()
    if buf[: len(MAGIC)] != MAGIC:
        raise CheckpointError("bad magic bytes: not a checkpoint file")
    version, header_len = struct.unpack_from("<II", buf, len(MAGIC))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    header_start = len(MAGIC) + 8
    try:
        header = json.loads(buf[header_start : header_start + header_len])
    except json.JSONDecodeError as e:
        raise CheckpointError(f"bad header json: {e}") from e

    config = SimConfig(**{k: v for k, v in header["config"].items()})
    if header.get("config_sha256") != config_hash(config):
        raise CheckpointError("config hash mismatch")

    m, n = config.max_agents, config.max_resources
    nn = config.n_neurons
    p = policy_layout(config).size
    w = header["n_walls"]

    r = _Reader(buf, header_start + header_len)
    agents = AgentSet(
        active=r.take((m,), "<u1").astype(bool),
        uid=r.take((m,), "<u8"),
        position=r.take((m, 2), "<f8"),
        velocity=r.take((m, 2), "<f8"),
        energy=r.take((m,), "<f8"),
        rates=r.take((m, nn), "<f8"),
        params=r.take((m, p), "<f8"),
        next_uid=header["next_uid"],
        overflow_count=header["overflow_count"],
    )
    resources = ResourceSet(
        active=r.take((n,), "<u1").astype(bool),
        position=r.take((n, 2), "<f8"),
        value=r.take((n,), "<f8"),
    )
    walls = r.take((w, 2, 2), "<f8")
    if r.offset != len(buf):
        raise CheckpointError("trailing bytes after checkpoint payload")
    world = WorldGeometry(
        extent=config.world_extent, boundary_mode=config.boundary_mode, walls=walls
    )
    stats = SimStats(
        births=header["births"],
        deaths=header["deaths"],
        total_extracted=header["total_extracted"],
        energy_from_harvest=header["energy_from_harvest"],
    )
    state = SimState(
        step=header["step"], agents=agents, resources=resources, world=world, stats=stats
    )
    return state, config
