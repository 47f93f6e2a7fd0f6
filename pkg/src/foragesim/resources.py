"""Logistic resource dynamics with rationed agent harvesting.

Per resource n: growth g = epsilon*s - alpha*s^2, demand D = sum over
active agents of the harvest kernel w. The post-growth stock
A = max(0, s + dt*g) caps extraction E = min(dt*D, A); when demand exceeds
supply, every agent's share of that resource is scaled by E/(dt*D).
s' = A - E is therefore never negative, and the sum of per-agent credits
equals the sum of per-resource extractions up to summation rounding.

Harvest credits are in resource units; energy conversion (the efficiency
factor) is the engine's job, keeping the coupling's accounting pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .config import SimConfig
from .geometry import displacement, pairwise_displacement

if TYPE_CHECKING:
    from .state import AgentSet, ResourceSet


@dataclass(frozen=True)
class HarvestKernelParams:
    """Bounded rational kernel: w(d) = gain / (1 + d^2/scale^2) for d <= cutoff, else 0."""

    gain: float
    scale: float
    cutoff: float

    def __post_init__(self):
        if not (self.gain >= 0 and math.isfinite(self.gain)):
            raise ValueError("kernel gain must be finite and >= 0")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError("kernel scale must be finite and > 0")
        if not (self.cutoff >= 0 and math.isfinite(self.cutoff)):
            raise ValueError("kernel cutoff must be finite and >= 0")

    @classmethod
    def from_config(cls, config: SimConfig) -> "HarvestKernelParams":
        return cls(
            gain=config.kernel_gain,
            scale=config.kernel_scale,
            cutoff=config.kernel_cutoff,
        )


@dataclass(frozen=True)
class HarvestReport:
    """Exact transfer accounting for one resource step."""

    per_agent: np.ndarray  # (M,) resource units credited this step
    per_resource: np.ndarray  # (N,) resource units extracted this step
    total_extracted: float


def harvest_rate(x_n, x_m, kernel: HarvestKernelParams, extent=None) -> float:
    """Kernel value between one resource and one agent position.

    `extent` switches the distance to the minimum-image (periodic) metric.
    """
    d = displacement(np.asarray(x_n, dtype=float), np.asarray(x_m, dtype=float), extent)
    d2 = float(np.dot(d, d))
    if d2 > kernel.cutoff * kernel.cutoff:
        return 0.0
    return kernel.gain / (1.0 + d2 / (kernel.scale * kernel.scale))


def kernel_matrix(
    res_pos: np.ndarray,
    agent_pos: np.ndarray,
    kernel: HarvestKernelParams,
    extent=None,
) -> np.ndarray:
    """(N, M) kernel values; cutoff short-circuits to exact zeros."""
    dx, dy = pairwise_displacement(res_pos, agent_pos, extent)
    dx *= dx
    dy *= dy
    dx += dy
    d2 = dx
    w = np.divide(d2, kernel.scale * kernel.scale)
    w += 1.0
    np.divide(kernel.gain, w, out=w)
    return np.where(d2 <= kernel.cutoff * kernel.cutoff, w, 0.0)


def resource_step(
    resources: "ResourceSet",
    agents: "AgentSet",
    config: SimConfig,
    dt: float,
) -> tuple["ResourceSet", HarvestReport]:
    """One growth/harvest update; returns the new set and the transfer report.

    All reductions run in slot-index order, so results are bit-deterministic
    for a given layout. Inactive resources and agents contribute nothing.
    """
    kernel = HarvestKernelParams.from_config(config)
    extent = config.world_extent if config.boundary_mode == "periodic" else None

    s = resources.value
    w = kernel_matrix(resources.position, agents.position, kernel, extent)
    pair_active = resources.active[:, None] & agents.active[None, :]
    w = np.where(pair_active, w, 0.0)

    demand = w.sum(axis=1)
    growth = s * (config.epsilon - config.alpha * s)
    available = np.maximum(0.0, s + dt * growth)
    requested = dt * demand
    extracted = np.minimum(requested, available)
    share_scale = np.divide(
        extracted, requested, out=np.zeros_like(extracted), where=requested > 0
    )
    new_value = available - extracted
    credit = dt * (w * share_scale[:, None]).sum(axis=0)

    report = HarvestReport(
        per_agent=credit,
        per_resource=extracted,
        total_extracted=float(extracted.sum()),
    )
    return resources.replace(value=new_value), report
