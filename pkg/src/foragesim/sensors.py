"""Per-agent observation construction: ray-cast wall distances and resource fields.

Observation layout (frozen; policy input weights depend on it), for K rays:

    [0, K)      ray distances, each in [0, ray_max_range]
    [K]         resource signal  = sum_n s_n * w(x_n, x_m)/gain
    [K+1, K+3)  resource gradient (analytic spatial gradient of the signal)
    [K+3, K+5)  own velocity
    [K+5]       own energy

so the observation width is K + 6. Rays fan at fixed offsets 2*pi*k/K
relative to the agent's velocity direction (relative to +x when the speed
is below 1e-9). Resource sensing reuses the harvest kernel, so agents
sense exactly what they can harvest. Inactive slots observe all zeros.
"""

from __future__ import annotations

from collections import namedtuple

import numpy as np

from .config import SimConfig
from .geometry import boundary_segments, pairwise_displacement
from .resources import HarvestKernelParams

OBS_EXTRA = 6
STILL_SPEED = 1e-9

ObservationView = namedtuple(
    "ObservationView",
    ["ray_distances", "resource_signal", "resource_gradient", "own_velocity", "own_energy"],
)


def observation_dim(n_rays: int) -> int:
    return n_rays + OBS_EXTRA


def split_observation(obs: np.ndarray, n_rays: int) -> ObservationView:
    """Views into an observation array (single vector or batched rows)."""
    k = n_rays
    return ObservationView(
        ray_distances=obs[..., :k],
        resource_signal=obs[..., k],
        resource_gradient=obs[..., k + 1 : k + 3],
        own_velocity=obs[..., k + 3 : k + 5],
        own_energy=obs[..., k + 5],
    )


def world_segments(world) -> np.ndarray:
    """Wall segments plus, for non-periodic worlds, the four boundary faces."""
    if world.boundary_mode == "periodic":
        return world.walls
    faces = boundary_segments(world.extent)
    if world.walls.size == 0:
        return faces
    return np.concatenate([world.walls, faces], axis=0)


def _cast(origins: np.ndarray, directions: np.ndarray, segments: np.ndarray, max_range: float) -> np.ndarray:
    """Distances (M, K) from each origin along each unit direction to the nearest segment.

    Parametric ray-segment intersection: with ray p + t d and segment
    a + u (b - a), t = cross(a - p, e) / cross(d, e) and
    u = cross(a - p, d) / cross(d, e) for e = b - a; a hit needs t >= 0 and
    u in [0, 1]. Parallel rays (zero denominator) never hit. Misses and
    hits beyond max_range report max_range.
    """
    m, k = directions.shape[0], directions.shape[1]
    if segments.shape[0] == 0:
        return np.full((m, k), float(max_range))
    a = segments[:, 0, :]
    e = segments[:, 1, :] - segments[:, 0, :]
    ap = a[None, None, :, :] - origins[:, None, None, :]  # (M, 1, S, 2)
    d = directions[:, :, None, :]  # (M, K, 1, 2)

    denom = d[..., 0] * e[None, None, :, 1] - d[..., 1] * e[None, None, :, 0]
    t_num = ap[..., 0] * e[None, None, :, 1] - ap[..., 1] * e[None, None, :, 0]
    u_num = ap[..., 0] * d[..., 1] - ap[..., 1] * d[..., 0]

    with np.errstate(divide="ignore", invalid="ignore"):
        t = t_num / denom
        u = u_num / denom
    hit = (denom != 0) & (t >= 0.0) & (u >= 0.0) & (u <= 1.0)
    t = np.where(hit, t, np.inf)
    return np.minimum(t.min(axis=2), float(max_range))


def ray_cast(origin, direction, world, max_range: float) -> float:
    """Distance from origin along a unit direction to the nearest wall or face."""
    direction = np.asarray(direction, dtype=float)
    norm = float(np.linalg.norm(direction))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"direction must be unit length, |d| = {norm}")
    origin = np.asarray(origin, dtype=float).reshape(1, 2)
    dist = _cast(origin, direction.reshape(1, 1, 2), world_segments(world), max_range)
    return float(dist[0, 0])


def ray_directions(velocity: np.ndarray, n_rays: int) -> np.ndarray:
    """(M, K, 2) unit fan directions anchored to each agent's velocity heading."""
    speed = np.linalg.norm(velocity, axis=1)
    heading = np.where(speed >= STILL_SPEED, np.arctan2(velocity[:, 1], velocity[:, 0]), 0.0)
    offsets = 2.0 * np.pi * np.arange(n_rays) / n_rays
    angles = heading[:, None] + offsets[None, :]
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def observe(agents, resources, world, config: SimConfig) -> np.ndarray:
    """(M, obs_dim) observation rows for every slot; inactive rows all-zero."""
    out = np.zeros((agents.capacity, observation_dim(config.n_rays)))
    observe_into(out, 0, agents.capacity, agents, resources, world, config)
    return out


def observe_into(out, lo: int, hi: int, agents, resources, world, config: SimConfig):
    """Fill observation rows [lo, hi); the chunked form used by worker pools."""
    k = config.n_rays
    kernel = HarvestKernelParams.from_config(config)
    pos = agents.position[lo:hi]
    vel = agents.velocity[lo:hi]

    dirs = ray_directions(vel, k)
    rays = _cast(pos, dirs, world_segments(world), config.ray_max_range)

    # resource signal and its analytic gradient, via the (normalized) harvest kernel
    dx, dy = pairwise_displacement(pos, resources.position, world.periodic_extent)
    d2 = dx * dx
    d2 += dy * dy
    scale2 = kernel.scale * kernel.scale
    base = np.divide(d2, scale2)
    base += 1.0
    np.divide(1.0, base, out=base)
    within = (d2 <= kernel.cutoff * kernel.cutoff) & resources.active[None, :]
    sval = np.where(within, resources.value[None, :], 0.0)
    sval *= base
    signal = sval.sum(axis=1)
    # d(base)/dx = -(2/scale^2) * base^2 * dx, summed with the value weights
    coeff = sval
    coeff *= base
    coeff *= -2.0 / scale2
    dx *= coeff
    dy *= coeff

    block = out[lo:hi]
    block[:, :k] = rays
    block[:, k] = signal
    block[:, k + 1] = dx.sum(axis=1)
    block[:, k + 2] = dy.sum(axis=1)
    block[:, k + 3 : k + 5] = vel
    block[:, k + 5] = agents.energy[lo:hi]
    block[~agents.active[lo:hi]] = 0.0
