"""Rate-based recurrent population policy.

Each agent carries a leaky rate network: n recurrently connected neurons
driven by the observation vector, with the planar control read out as the
mean over neurons of a linear readout. Parameters live flattened in
AgentSet.params with a frozen layout (see PolicyLayout); evolution and
serialization depend on that order.

Flat layout, in order: W_rec row-major (n*n), W_in row-major (n*obs_dim),
b (n), W_out row-major (out_dim*n), tau (1 scalar, seconds).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError


@dataclass(frozen=True)
class PolicyLayout:
    n_neurons: int
    obs_dim: int
    out_dim: int = 2

    @property
    def size(self) -> int:
        n, d, o = self.n_neurons, self.obs_dim, self.out_dim
        return n * n + n * d + n + o * n + 1

    @property
    def tau_index(self) -> int:
        return self.size - 1

    def sections(self) -> dict[str, slice]:
        n, d, o = self.n_neurons, self.obs_dim, self.out_dim
        a = n * n
        b = a + n * d
        c = b + n
        e = c + o * n
        return {
            "w_rec": slice(0, a),
            "w_in": slice(a, b),
            "bias": slice(b, c),
            "w_out": slice(c, e),
            "tau": slice(e, e + 1),
        }

    def unpack(self, params: np.ndarray):
        """Views (W_rec, W_in, b, W_out, tau) into flat params; batched or single."""
        n, d, o = self.n_neurons, self.obs_dim, self.out_dim
        s = self.sections()
        lead = params.shape[:-1]
        w_rec = params[..., s["w_rec"]].reshape(*lead, n, n)
        w_in = params[..., s["w_in"]].reshape(*lead, n, d)
        bias = params[..., s["bias"]]
        w_out = params[..., s["w_out"]].reshape(*lead, o, n)
        tau = params[..., self.tau_index]
        return w_rec, w_in, bias, w_out, tau


def init_params(
    rng: np.random.Generator,
    layout: PolicyLayout,
    gain: float = 1.0,
    tau: float = 1.0,
    size: int | None = None,
) -> np.ndarray:
    """Random flat parameter vector(s).

    W_rec entries are N(0, (gain/sqrt(n))^2); W_in N(0, (gain/sqrt(obs_dim))^2);
    W_out N(0, (gain/sqrt(n))^2); bias zero; tau the given constant.
    """
    n, d = layout.n_neurons, layout.obs_dim
    s = layout.sections()
    std = np.zeros(layout.size)
    std[s["w_rec"]] = gain / np.sqrt(n)
    std[s["w_in"]] = gain / np.sqrt(d)
    std[s["w_out"]] = gain / np.sqrt(n)
    shape = (layout.size,) if size is None else (size, layout.size)
    params = rng.standard_normal(shape) * std
    params[..., layout.tau_index] = tau
    return params


def step_policy(
    params: np.ndarray,
    rates: np.ndarray,
    obs: np.ndarray,
    dt: float,
    layout: PolicyLayout,
    active: np.ndarray | None = None,
    uids: np.ndarray | None = None,
):
    """One leaky-integration update and readout.

    r' = r + (dt/tau) * (-r + tanh(W_rec r + W_in obs + b));
    u  = (W_out r') / n_neurons   (mean of per-neuron readout contributions).

    Accepts a single agent (1-D inputs) or a batch (leading slot axis).
    Inactive slots (all-zero params/rates/obs) yield r' = 0 and u = 0; the
    zero tau of padded slots is replaced by 1 internally so no division
    blows up. Raises NumericalError naming the offending agent if the
    update is non-finite.
    """
    single = params.ndim == 1
    params = np.atleast_2d(params)
    rates = np.atleast_2d(rates)
    obs = np.atleast_2d(obs)
    w_rec, w_in, bias, w_out, tau = layout.unpack(params)

    drive = (
        np.einsum("mij,mj->mi", w_rec, rates)
        + np.einsum("mij,mj->mi", w_in, obs)
        + bias
    )
    tau_safe = np.where(tau > 0, tau, 1.0)
    new_rates = rates + (dt / tau_safe)[:, None] * (np.tanh(drive) - rates)
    control = np.einsum("moj,mj->mo", w_out, new_rates) / layout.n_neurons

    if active is not None:
        new_rates = np.where(active[:, None], new_rates, 0.0)
        control = np.where(active[:, None], control, 0.0)

    bad = ~(np.isfinite(new_rates).all(axis=1) & np.isfinite(control).all(axis=1))
    if bad.any():
        slot = int(np.flatnonzero(bad)[0])
        uid = int(uids[slot]) if uids is not None else None
        label = f"uid={uid}" if uid is not None else f"slot={slot}"
        raise NumericalError(f"policy update produced non-finite state ({label})", uid=uid)

    if single:
        return new_rates[0], control[0]
    return new_rates, control


def step_policy_into(
    out_rates: np.ndarray,
    out_control: np.ndarray,
    lo: int,
    hi: int,
    params: np.ndarray,
    rates: np.ndarray,
    obs: np.ndarray,
    dt: float,
    layout: PolicyLayout,
    active: np.ndarray,
    uids: np.ndarray,
):
    """Row-range variant writing into preallocated outputs (worker chunking)."""
    r, u = step_policy(
        params[lo:hi],
        rates[lo:hi],
        obs[lo:hi],
        dt,
        layout,
        active=active[lo:hi],
        uids=uids[lo:hi],
    )
    out_rates[lo:hi] = r
    out_control[lo:hi] = u
