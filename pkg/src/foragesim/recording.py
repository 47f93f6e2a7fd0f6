"""Columnar run artifacts: step-record log, snapshot frames, run manifest.

Everything written here is reproducible byte-for-byte from
(config, seed, version): floats are formatted with repr, row order is slot
order, and no wall-clock data is persisted (step durations live only in
the in-memory StepRecord, where bench reads them).

Record log: CSV, one header row then one row per emitted record, columns
RECORD_COLUMNS.

Frame file: first a `# world_extent,<Lx>,<Ly>` comment (so offline
rendering is self-contained), then a CSV header and one row per active
entity: agents as `agent,<uid>,<x>,<y>,<vx>,<vy>,<energy>` (slot order),
then resources as `resource,,<x>,<y>,,,<value>`. One file per frame,
named frame_<step, zero-padded to 8 digits>.csv.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import SimConfig, config_hash, dumps_config
from .errors import FrameFormatError

RECORD_COLUMNS = (
    "step",
    "n_agents",
    "n_resources",
    "mean_energy",
    "min_energy",
    "max_energy",
    "total_resource",
    "births",
    "deaths",
)

FRAME_COLUMNS = ("kind", "uid", "x", "y", "vx", "vy", "value")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def record_header() -> str:
    return ",".join(RECORD_COLUMNS)


def record_row(rec) -> str:
    return ",".join(_fmt(getattr(rec, name)) for name in RECORD_COLUMNS)


def frame_filename(step: int) -> str:
    return f"frame_{step:08d}.csv"


def write_frame(path, agents, resources, extent) -> None:
    lines = [f"# world_extent,{float(extent[0])!r},{float(extent[1])!r}"]
    lines.append(",".join(FRAME_COLUMNS))
    for i in np.flatnonzero(agents.active):
        x, y = (float(v) for v in agents.position[i])
        vx, vy = (float(v) for v in agents.velocity[i])
        lines.append(
            f"agent,{int(agents.uid[i])},{x!r},{y!r},{vx!r},{vy!r},{float(agents.energy[i])!r}"
        )
    for i in np.flatnonzero(resources.active):
        x, y = (float(v) for v in resources.position[i])
        lines.append(f"resource,,{x!r},{y!r},,,{float(resources.value[i])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_frame(path):
    """Parse a frame file -> (extent, agent rows, resource rows).

    Agent rows are (uid, x, y, vx, vy, energy); resource rows (x, y, value).
    Raises FrameFormatError naming the file and line on malformed input.
    """
    path = Path(path)
    extent = None
    agents, resources = [], []
    lines = path.read_text().splitlines()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split(",")
            if parts[0] == "world_extent":
                try:
                    extent = (float(parts[1]), float(parts[2]))
                except (IndexError, ValueError):
                    raise FrameFormatError(path, line_no, "bad world_extent header") from None
            continue
        parts = line.split(",")
        if parts == list(FRAME_COLUMNS):
            continue
        if len(parts) != len(FRAME_COLUMNS):
            raise FrameFormatError(
                path, line_no, f"expected {len(FRAME_COLUMNS)} fields, got {len(parts)}"
            )
        kind = parts[0]
        try:
            if kind == "agent":
                agents.append(
                    (int(parts[1]), *(float(v) for v in parts[2:7]))
                )
            elif kind == "resource":
                resources.append((float(parts[2]), float(parts[3]), float(parts[6])))
            else:
                raise FrameFormatError(path, line_no, f"unknown entity kind {kind!r}")
        except ValueError:
            raise FrameFormatError(path, line_no, "unparseable numeric field") from None
    if extent is None:
        raise FrameFormatError(path, 1, "missing world_extent header")
    return extent, agents, resources


def write_manifest(path, config: SimConfig) -> None:
    """Run manifest: effective config, seed, and versions, deterministic bytes."""
    manifest = {
        "config": config.to_dict(),
        "seed": config.seed,
        "n_steps": config.n_steps,
        "config_sha256": config_hash(config),
        "package": "foragesim",
        "package_version": __version__,
        "record_columns": list(RECORD_COLUMNS),
        "frame_columns": list(FRAME_COLUMNS),
    }
    Path(path).write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def write_effective_config(path, config: SimConfig) -> None:
    Path(path).write_text(dumps_config(config))
