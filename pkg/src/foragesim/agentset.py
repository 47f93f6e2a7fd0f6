"""Constant-shape agent-set manipulation: select, sort, add, remove.

All four operations are snapshot-in/snapshot-out and preserve the
zero-padding contract: shapes never change, inactive slots are all-zero,
uids are unique and monotonically assigned (uid 0 reserved). Predicates
and sort keys form closed registries so selections stay serializable and
auditable; extend by adding registry entries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import UINT64_MAX
from .errors import CapacityError, ForageSimError
from .state import AgentSet

_FIELDS = ("position", "velocity", "energy", "rates", "params")


def _energy_below(aset: AgentSet, threshold: float) -> np.ndarray:
    return aset.energy < threshold


def _energy_above(aset: AgentSet, threshold: float) -> np.ndarray:
    return aset.energy > threshold


def _uid_equals(aset: AgentSet, uid: int) -> np.ndarray:
    return aset.uid == np.uint64(uid)


def _in_region(aset: AgentSet, x_min: float, x_max: float, y_min: float, y_max: float) -> np.ndarray:
    x, y = aset.position[:, 0], aset.position[:, 1]
    return (x >= x_min) & (x <= x_max) & (y >= y_min) & (y <= y_max)


PREDICATES = {
    "energy_below": _energy_below,
    "energy_above": _energy_above,
    "uid_equals": _uid_equals,
    "in_region": _in_region,
}

SORT_KEYS = ("energy", "uid", "position_axis")


def select(aset: AgentSet, predicate: str, **args) -> np.ndarray:
    """Slot mask, true exactly where the slot is active and the predicate holds."""
    try:
        fn = PREDICATES[predicate]
    except KeyError:
        raise ValueError(
            f"unknown predicate {predicate!r}; known: {sorted(PREDICATES)}"
        ) from None
    return fn(aset, **args) & aset.active


def _key_values(aset: AgentSet, key: str, axis: int) -> np.ndarray:
    if key == "energy":
        return aset.energy
    if key == "uid":
        return aset.uid
    if key == "position_axis":
        if axis not in (0, 1):
            raise ValueError("axis must be 0 or 1")
        return aset.position[:, axis]
    raise ValueError(f"unknown sort key {key!r}; known: {sorted(SORT_KEYS)}")


def sort(aset: AgentSet, key: str, descending: bool = False, axis: int = 0) -> AgentSet:
    """Stable-sort active slots by key and pack them to the front.

    Inactive (all-zero) slots end up behind the active block; shapes and
    the active count are unchanged. Descending order keeps ties in
    original slot order, like ascending does.
    """
    vals = _key_values(aset, key, axis)
    idx = aset.active_indices
    sub = vals[idx]
    if descending:
        # monotone flip that avoids uint64 negation overflow
        sub = np.iinfo(sub.dtype).max - sub if sub.dtype.kind == "u" else -sub
    perm = idx[np.argsort(sub, kind="stable")]

    k = len(perm)
    cap = aset.capacity
    active = np.zeros(cap, dtype=bool)
    active[:k] = True
    uid = np.zeros(cap, dtype=np.uint64)
    uid[:k] = aset.uid[perm]
    out = {}
    for name in _FIELDS:
        arr = getattr(aset, name)
        fresh = np.zeros_like(arr)
        fresh[:k] = arr[perm]
        out[name] = fresh
    return aset.replace(active=active, uid=uid, **out)


@dataclass(frozen=True)
class SpawnBatch:
    """Zero-padded batch of agents to insert; `active` flags the real rows."""

    active: np.ndarray
    position: np.ndarray
    velocity: np.ndarray
    energy: np.ndarray
    rates: np.ndarray
    params: np.ndarray

    @property
    def capacity(self) -> int:
        return self.active.shape[0]

    @property
    def count(self) -> int:
        return int(self.active.sum())

    @classmethod
    def pack(cls, position, velocity, energy, rates, params, capacity: int | None = None):
        """Build a batch from k rows of state, zero-padding up to `capacity`."""
        position = np.atleast_2d(np.asarray(position, dtype=float))
        k = position.shape[0]
        cap = k if capacity is None else capacity
        if k > cap:
            raise ValueError(f"batch of {k} rows exceeds batch capacity {cap}")
        b_active = np.zeros(cap, dtype=bool)
        b_active[:k] = True

        def padded(rows, width=None):
            rows = np.asarray(rows, dtype=float)
            if width is None:
                out = np.zeros(cap)
            else:
                rows = rows.reshape(k, width) if k else rows.reshape(0, width)
                out = np.zeros((cap, width))
            out[:k] = rows
            return out

        return cls(
            active=b_active,
            position=padded(position, 2),
            velocity=padded(velocity, 2),
            energy=padded(energy),
            rates=padded(rates, np.asarray(rates).shape[-1] if k else 1),
            params=padded(params, np.asarray(params).shape[-1] if k else 1),
        )


def add(aset: AgentSet, batch: SpawnBatch, overflow_policy: str = "strict") -> tuple[AgentSet, int]:
    """Place the batch's real rows into the lowest-index free slots, in batch order.

    Each placed agent receives the next uid. Returns (new set, accepted
    count). Under "strict" a batch that does not fit raises CapacityError
    and the set is unchanged; under "drop_and_count" the overflow counter
    absorbs the unplaced remainder.
    """
    src = np.flatnonzero(batch.active)
    k = len(src)
    free = np.flatnonzero(~aset.active)
    accepted = min(k, len(free))
    if accepted < k and overflow_policy == "strict":
        raise CapacityError(
            f"spawn batch of {k} exceeds free capacity {len(free)} (strict mode)"
        )
    if k == 0:
        return aset, 0
    if accepted == 0:
        return aset.replace(overflow_count=aset.overflow_count + k), 0
    if aset.next_uid + accepted - 1 > UINT64_MAX:
        # unreachable at any realistic scale; guarded so wrap-around can never
        # silently mint a duplicate or reserved uid
        raise ForageSimError("uid counter exhausted")

    dest = free[:accepted]
    take = src[:accepted]
    active = aset.active.copy()
    uid = aset.uid.copy()
    active[dest] = True
    uid[dest] = np.arange(aset.next_uid, aset.next_uid + accepted, dtype=np.uint64)
    out = {}
    for name in _FIELDS:
        arr = getattr(aset, name).copy()
        arr[dest] = getattr(batch, name)[take]
        out[name] = arr
    return (
        aset.replace(
            active=active,
            uid=uid,
            next_uid=aset.next_uid + accepted,
            overflow_count=aset.overflow_count + (k - accepted),
            **out,
        ),
        accepted,
    )


def remove(aset: AgentSet, mask: np.ndarray) -> AgentSet:
    """Deactivate masked active slots, restoring them to all-zero padding."""
    kill = np.asarray(mask, dtype=bool) & aset.active
    if not kill.any():
        return aset
    active = aset.active & ~kill
    uid = np.where(kill, np.uint64(0), aset.uid)
    out = {}
    for name in _FIELDS:
        arr = getattr(aset, name)
        zeroed = np.where(kill[:, None] if arr.ndim == 2 else kill, 0.0, arr)
        out[name] = zeroed
    return aset.replace(active=active, uid=uid, **out)
