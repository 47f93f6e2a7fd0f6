"""Double-integrator motion update and boundary-condition enforcement.

Integration is semi-implicit (symplectic) Euler per axis: velocity first,
then position with the new velocity. Boundary enforcement runs after
integration each step. Interior walls are sensed, never collided with.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError
from .state import AgentSet, WorldGeometry


def integrate(agents: AgentSet, u: np.ndarray, dt: float) -> AgentSet:
    """Apply acceleration u (M, 2) for one step: v' = v + u dt; x' = x + v' dt.

    Inactive slots stay all-zero (u is required to be zero there and the
    result is masked regardless). Raises NumericalError naming the agent
    if the new state is non-finite.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    u = np.asarray(u, dtype=float)
    if u.shape != agents.velocity.shape:
        raise ValueError(f"u shape {u.shape} != velocity shape {agents.velocity.shape}")
    mask = agents.active[:, None]
    velocity = np.where(mask, agents.velocity + u * dt, 0.0)
    position = np.where(mask, agents.position + velocity * dt, 0.0)

    bad = agents.active & ~(
        np.isfinite(position).all(axis=1) & np.isfinite(velocity).all(axis=1)
    )
    if bad.any():
        uid = int(agents.uid[np.flatnonzero(bad)[0]])
        raise NumericalError(f"non-finite motion state (uid={uid})", uid=uid)
    return agents.replace(position=position, velocity=velocity)


def apply_boundary(agents: AgentSet, world: WorldGeometry) -> AgentSet:
    """Enforce the world's boundary rule on positions (and velocity where it applies).

    periodic: wrap modulo extent. reflective: mirror at the faces and negate
    the corresponding velocity component (triangle-wave folding, so points
    arbitrarily far out fold back in one pass). clamped: clip to the
    boundary and zero the clipped axis' velocity. Idempotent on in-bounds
    agents.
    """
    ext = np.asarray(world.extent)
    mask = agents.active[:, None]
    pos, vel = agents.position, agents.velocity
    mode = world.boundary_mode

    if mode == "periodic":
        wrapped = np.mod(pos, ext)
        # float rounding can land exactly on the extent; fold it to 0
        wrapped = np.where(wrapped >= ext, 0.0, wrapped)
        new_pos = np.where(mask, wrapped, 0.0)
        new_vel = vel
    elif mode == "reflective":
        period = 2.0 * ext
        z = np.mod(pos, period)
        z = np.where(z >= period, 0.0, z)
        mirrored = z > ext
        folded = np.where(mirrored, period - z, z)
        new_pos = np.where(mask, folded, 0.0)
        new_vel = np.where(mask & mirrored, -vel, vel)
    elif mode == "clamped":
        clipped = np.clip(pos, 0.0, ext)
        hit = clipped != pos
        new_pos = np.where(mask, clipped, 0.0)
        new_vel = np.where(mask & hit, 0.0, vel)
    else:
        raise ValueError(f"unknown boundary mode {mode!r}")

    return agents.replace(position=new_pos, velocity=new_vel)


def clip_speed(agents: AgentSet, max_speed: float) -> AgentSet:
    """Rescale velocities whose magnitude exceeds max_speed (optional, off by default)."""
    speed = np.linalg.norm(agents.velocity, axis=1)
    over = agents.active & (speed > max_speed)
    if not over.any():
        return agents
    factor = np.where(over, max_speed / np.where(speed > 0, speed, 1.0), 1.0)
    return agents.replace(velocity=agents.velocity * factor[:, None])
