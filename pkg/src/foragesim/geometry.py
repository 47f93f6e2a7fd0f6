"""Shared planar geometry helpers: displacements, containment, wall segments."""

from __future__ import annotations

import numpy as np


def _fold_min_image(d: np.ndarray, extent) -> np.ndarray:
    """In-place minimum-image fold: d -= L * rint(d / L), per axis or scalar L."""
    t = np.divide(d, extent)
    np.rint(t, out=t)
    t *= extent
    d -= t
    return d


def displacement(a: np.ndarray, b: np.ndarray, extent=None) -> np.ndarray:
    """a - b, minimum-image per axis when a periodic extent is given.

    Broadcasts; the last axis is (x, y). With `extent` the result lies in
    [-L/2, L/2] per axis.
    """
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if extent is not None:
        d = _fold_min_image(d, np.asarray(extent, dtype=float))
    return d


def pairwise_displacement(a: np.ndarray, b: np.ndarray, extent=None):
    """Per-axis displacement matrices (dx, dy) of a[:, None] - b[None, :].

    Same arithmetic as `displacement` (divide, rint, multiply, subtract),
    axis by axis, so the two paths agree bitwise; this form avoids the
    (A, B, 2) intermediate on hot paths.
    """
    dx = np.subtract.outer(a[:, 0], b[:, 0])
    dy = np.subtract.outer(a[:, 1], b[:, 1])
    if extent is not None:
        _fold_min_image(dx, float(extent[0]))
        _fold_min_image(dy, float(extent[1]))
    return dx, dy


def contains(positions: np.ndarray, extent, boundary_mode: str) -> np.ndarray:
    """Per-row containment under the mode's rule.

    periodic uses the half-open box [0, L); reflective and clamped the
    closed box [0, L].
    """
    ext = np.asarray(extent, dtype=float)
    pos = np.asarray(positions, dtype=float)
    if boundary_mode == "periodic":
        ok = (pos >= 0.0) & (pos < ext)
    else:
        ok = (pos >= 0.0) & (pos <= ext)
    return ok.all(axis=-1)


def boundary_segments(extent) -> np.ndarray:
    """The four world faces as wall segments, counter-clockwise from the bottom."""
    lx, ly = float(extent[0]), float(extent[1])
    return np.array(
        [
            [[0.0, 0.0], [lx, 0.0]],
            [[lx, 0.0], [lx, ly]],
            [[lx, ly], [0.0, ly]],
            [[0.0, ly], [0.0, 0.0]],
        ]
    )


def as_segment_array(walls) -> np.ndarray:
    """Normalize wall input (list of endpoint pairs or array) to shape (W, 2, 2)."""
    if walls is None:
        return np.zeros((0, 2, 2))
    arr = np.asarray(walls, dtype=float)
    if arr.size == 0:
        return np.zeros((0, 2, 2))
    arr = arr.reshape(-1, 2, 2)
    return arr
