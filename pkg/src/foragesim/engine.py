"""The per-step composition and run loop.

Phase order inside one step (fixed; each phase reads the previous phase's
output snapshot):

    1. observe            2. policy update -> acceleration u
    3. integrate          4. boundary enforcement (optional speed clip between)
    5. resource growth/harvest
    6. energy update      E' = E + eta*harvest - dt*(metabolic + move_cost*|u|)
    7. births/deaths      8. stats + record

Harvesting therefore uses post-movement positions: agents harvest where
they arrive. Runs are continual — state is never reset.

Randomness comes exclusively from counter-based streams keyed by
(seed, step, phase), so a resumed run replays the exact trajectory and
worker counts cannot perturb results: per-slot phases (observe, policy)
may be chunked across a thread pool, while every cross-slot reduction is
a single fixed slot-order numpy reduction.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import rng
from .config import SimConfig
from .dynamics import apply_boundary, clip_speed, integrate
from .errors import AuditError, NumericalError
from .evolution import step_population
from .geometry import contains
from .policy import step_policy_into
from .recording import (
    frame_filename,
    record_header,
    record_row,
    write_effective_config,
    write_frame,
    write_manifest,
)
from .resources import resource_step
from .sensors import observation_dim, observe_into
from .state import AgentSet, ResourceSet, WorldGeometry, policy_layout, state_init


@dataclass(frozen=True)
class SimStats:
    """Cumulative run counters; consistent with the event history by audit."""

    births: int = 0
    deaths: int = 0
    total_extracted: float = 0.0
    energy_from_harvest: float = 0.0


@dataclass(frozen=True)
class SimState:
    step: int
    agents: AgentSet
    resources: ResourceSet
    world: WorldGeometry
    stats: SimStats = field(default_factory=SimStats)


@dataclass(frozen=True)
class StepRecord:
    step: int
    n_agents: int
    n_resources: int
    mean_energy: float
    min_energy: float
    max_energy: float
    total_resource: float
    births: int
    deaths: int
    duration_s: float  # in-memory only; never persisted (records must be reproducible)


def init_state(config: SimConfig, walls=None) -> SimState:
    agents, resources, world = state_init(config, walls)
    return SimState(step=0, agents=agents, resources=resources, world=world)


def _chunk_bounds(n: int, workers: int):
    size = (n + workers - 1) // workers
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]


def step(
    state: SimState,
    config: SimConfig,
    *,
    pool: ThreadPoolExecutor | None = None,
    n_workers: int = 1,
    debug: bool = False,
) -> tuple[SimState, StepRecord]:
    """Advance one step; returns the new snapshot and its record."""
    t0 = time.perf_counter()
    agents, resources, world = state.agents, state.resources, state.world
    layout = policy_layout(config)
    cap = agents.capacity

    obs = np.zeros((cap, observation_dim(config.n_rays)))
    new_rates = np.zeros_like(agents.rates)
    control = np.zeros((cap, 2))

    def sense(lo, hi):
        observe_into(obs, lo, hi, agents, resources, world, config)

    def act(lo, hi):
        step_policy_into(
            new_rates, control, lo, hi,
            agents.params, agents.rates, obs, config.dt, layout,
            active=agents.active, uids=agents.uid,
        )

    try:
        if pool is not None and n_workers > 1 and cap >= n_workers:
            bounds = _chunk_bounds(cap, n_workers)
            for fn in (sense, act):
                futures = [pool.submit(fn, lo, hi) for lo, hi in bounds]
                for f in futures:
                    f.result()
        else:
            sense(0, cap)
            act(0, cap)
    except NumericalError as e:
        e.step = state.step
        raise

    agents = agents.replace(rates=new_rates)
    try:
        agents = integrate(agents, control, config.dt)
    except NumericalError as e:
        e.step = state.step
        raise
    if config.max_speed > 0:
        agents = clip_speed(agents, config.max_speed)
    agents = apply_boundary(agents, world)

    resources, report = resource_step(resources, agents, config, config.dt)

    harvest_energy = config.harvest_efficiency * report.per_agent
    move_pay = config.move_cost * np.linalg.norm(control, axis=1)
    drain = config.dt * (config.metabolic_cost + move_pay)
    energy = np.where(agents.active, agents.energy + harvest_energy - drain, 0.0)
    agents = agents.replace(energy=energy)

    repro_stream = rng.stream(config.seed, state.step, rng.PHASE_REPRODUCE)
    agents, pop = step_population(agents, config, repro_stream)

    stats = SimStats(
        births=state.stats.births + pop.births,
        deaths=state.stats.deaths + pop.deaths,
        total_extracted=state.stats.total_extracted + report.total_extracted,
        energy_from_harvest=state.stats.energy_from_harvest + float(harvest_energy.sum()),
    )
    new_state = SimState(
        step=state.step + 1, agents=agents, resources=resources, world=world, stats=stats
    )
    if debug:
        audit_state(new_state, config)

    act_energy = agents.energy[agents.active]
    record = StepRecord(
        step=new_state.step,
        n_agents=agents.active_count,
        n_resources=resources.active_count,
        mean_energy=float(act_energy.mean()) if act_energy.size else 0.0,
        min_energy=float(act_energy.min()) if act_energy.size else 0.0,
        max_energy=float(act_energy.max()) if act_energy.size else 0.0,
        total_resource=float(resources.value.sum()),
        births=pop.births,
        deaths=pop.deaths,
        duration_s=time.perf_counter() - t0,
    )
    return new_state, record


@dataclass(frozen=True)
class RunResult:
    state: SimState
    records: list
    out_dir: Path | None = None


def run(
    config: SimConfig,
    *,
    out_dir=None,
    record_cadence: int = 100,
    frame_cadence: int = 0,
    n_workers: int = 1,
    debug: bool = False,
    initial_state: SimState | None = None,
    walls=None,
) -> RunResult:
    """Execute the scenario to config.n_steps; never resets state mid-run.

    With an `out_dir`, emits the manifest, the effective config, the record
    log at `record_cadence`, snapshot frames at `frame_cadence` (including
    the initial state as frame 0 on fresh runs), and a final checkpoint.
    Passing `initial_state` (e.g. a loaded checkpoint) continues that
    trajectory: steps initial_state.step+1 .. n_steps.
    """
    from .checkpoint import save_checkpoint

    state = initial_state if initial_state is not None else init_state(config, walls)

    frames_dir = None
    record_fh = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_manifest(out_dir / "manifest.json", config)
        write_effective_config(out_dir / "config.cfg", config)
        record_fh = open(out_dir / "records.csv", "w")
        record_fh.write(record_header() + "\n")
        if frame_cadence > 0:
            frames_dir = out_dir / "frames"
            frames_dir.mkdir(exist_ok=True)
            if state.step == 0:
                write_frame(
                    frames_dir / frame_filename(0), state.agents, state.resources,
                    config.world_extent,
                )

    pool = ThreadPoolExecutor(max_workers=n_workers) if n_workers > 1 else None
    records = []
    try:
        while state.step < config.n_steps:
            state, rec = step(state, config, pool=pool, n_workers=n_workers, debug=debug)
            if record_cadence > 0 and state.step % record_cadence == 0:
                records.append(rec)
                if record_fh is not None:
                    record_fh.write(record_row(rec) + "\n")
            if frames_dir is not None and state.step % frame_cadence == 0:
                write_frame(
                    frames_dir / frame_filename(state.step), state.agents,
                    state.resources, config.world_extent,
                )
    finally:
        if pool is not None:
            pool.shutdown()
        if record_fh is not None:
            record_fh.close()

    if out_dir is not None:
        save_checkpoint(out_dir / "final.ckpt", state, config)
    return RunResult(state=state, records=records, out_dir=out_dir)


@dataclass(frozen=True)
class BenchReport:
    valid: bool
    measured_steps: int
    elapsed_s: float
    steps_per_s: float
    agent_steps_per_s: float
    extrapolated_1m_steps_minutes: float

    def as_text(self) -> str:
        if not self.valid:
            return "bench: INVALID (zero measured steps)"
        return (
            f"bench: {self.measured_steps} steps in {self.elapsed_s:.3f} s"
            f" | {self.steps_per_s:.1f} steps/s"
            f" | {self.agent_steps_per_s:.0f} agent-steps/s"
            f" | extrapolated 1e6 steps: {self.extrapolated_1m_steps_minutes:.1f} min"
        )


def bench(config: SimConfig, n_steps: int, warmup: int = 10, n_workers: int = 1) -> BenchReport:
    """Time the bare run loop (no I/O) and extrapolate to a million steps."""
    state = init_state(config)
    pool = ThreadPoolExecutor(max_workers=n_workers) if n_workers > 1 else None
    try:
        for _ in range(warmup):
            state, _ = step(state, config, pool=pool, n_workers=n_workers)
        agent_steps = 0
        t0 = time.perf_counter()
        for _ in range(n_steps):
            state, rec = step(state, config, pool=pool, n_workers=n_workers)
            agent_steps += rec.n_agents
        elapsed = time.perf_counter() - t0
    finally:
        if pool is not None:
            pool.shutdown()

    valid = n_steps > 0 and elapsed > 0
    steps_per_s = n_steps / elapsed if valid else 0.0
    return BenchReport(
        valid=valid,
        measured_steps=n_steps,
        elapsed_s=elapsed if valid else 0.0,
        steps_per_s=steps_per_s,
        agent_steps_per_s=agent_steps / elapsed if valid else 0.0,
        extrapolated_1m_steps_minutes=(1e6 / steps_per_s) / 60.0 if valid else float("inf"),
    )


def audit_state(state: SimState, config: SimConfig) -> int:
    """Debug-mode contract audit; raises AuditError, returns the check count.

    Verifies shape constancy against the config-derived construction
    shapes, all-zero padding on inactive slots, uid uniqueness, boundary
    containment for the active mode, resource nonnegativity, finiteness,
    and stats consistency.
    """
    checks = 0
    a, r = state.agents, state.resources

    def ensure(cond: bool, message: str):
        nonlocal checks
        checks += 1
        if not cond:
            raise AuditError(f"step {state.step}: {message}")

    m, n = config.max_agents, config.max_resources
    p = policy_layout(config).size
    expected_agent_shapes = (
        (m,), (m,), (m, 2), (m, 2), (m,), (m, config.n_neurons), (m, p),
    )
    ensure(a.shape_signature() == expected_agent_shapes, "agent array shape changed")
    ensure(r.shape_signature() == ((n,), (n, 2), (n,)), "resource array shape changed")

    pad = ~a.active
    for name in ("uid", "position", "velocity", "energy", "rates", "params"):
        arr = getattr(a, name)
        ensure(not np.any(arr[pad]), f"nonzero padding in agents.{name}")
    ensure(not np.any(r.position[~r.active]), "nonzero padding in resources.position")
    ensure(not np.any(r.value[~r.active]), "nonzero padding in resources.value")

    live_uids = a.uid[a.active]
    ensure(len(np.unique(live_uids)) == len(live_uids), "duplicate active uids")
    ensure(not np.any(live_uids == 0), "active agent with reserved uid 0")
    ensure(
        live_uids.size == 0 or int(live_uids.max()) < a.next_uid,
        "active uid >= next_uid",
    )

    ensure(
        bool(contains(a.position[a.active], config.world_extent, config.boundary_mode).all()),
        "active agent out of bounds",
    )
    ensure(bool(np.isfinite(a.position).all() and np.isfinite(a.velocity).all()
                and np.isfinite(a.energy).all() and np.isfinite(a.rates).all()
                and np.isfinite(a.params).all()), "non-finite agent state")
    ensure(bool((r.value >= 0).all()), "negative resource value")
    ensure(bool(np.isfinite(r.value).all()), "non-finite resource value")

    ensure(a.active_count <= m, "population above capacity")
    s = state.stats
    ensure(
        s.births >= 0 and s.deaths >= 0 and s.total_extracted >= 0
        and s.energy_from_harvest >= 0 and a.overflow_count >= 0,
        "negative cumulative stat",
    )
    return checks
