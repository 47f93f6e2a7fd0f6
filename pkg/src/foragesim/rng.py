"""Counter-based random streams.

Every random draw in the engine comes from a Philox generator keyed by
(seed, context) where context encodes the step index and the consuming
phase. Streams are therefore a pure function of (config.seed, step, phase):
nothing stateful is carried between steps, checkpoint-resume replays the
exact stream, and worker counts cannot perturb the sequence because draws
are always made vectorized in slot-index order outside parallel sections.

Context ids: phases during step k use ``(k + 1) * N_PHASE_SLOTS + phase``;
initialization (conceptually step -1) uses the phase id directly.
"""

from __future__ import annotations

import numpy as np

# phase ids (< N_PHASE_SLOTS)
PHASE_INIT_AGENTS = 0
PHASE_INIT_PARAMS = 1
PHASE_INIT_RESOURCES = 2
PHASE_REPRODUCE = 3

N_PHASE_SLOTS = 8


def stream(seed: int, step: int, phase: int) -> np.random.Generator:
    """Generator for one (seed, step, phase) context; step -1 = init."""
    if not 0 <= phase < N_PHASE_SLOTS:
        raise ValueError(f"phase id {phase} out of range")
    context = (step + 1) * N_PHASE_SLOTS + phase
    key = np.array([seed, context], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
