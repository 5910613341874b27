"""Counter-based uniform random streams.

Every random draw in a run is a pure function of (seed, purpose, step,
lane), so results never depend on evaluation order, thread scheduling or
how a run is split across checkpoints. Streams are produced by a
splitmix64-style finalizer over the combined key.
"""

from __future__ import annotations

import numpy as np

# Stream purposes. Distinct constants keep draws for different uses
# statistically independent even at the same (seed, step).
ACTION_DRAW = 0xA5A50001
CCE_DRAW = 0xA5A50002

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF
_INV_2_53 = float(2.0**-53)


def _mix_int(x: int) -> int:
    # splitmix64 finalizer on Python ints, masked to 64 bits.
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * _MIX1) & _MASK
    x = ((x ^ (x >> 27)) * _MIX2) & _MASK
    return x ^ (x >> 31)


def stream_key(seed: int, purpose: int) -> int:
    """Collapse (seed, purpose) into one 64-bit stream key."""
    return _mix_int((seed & _MASK) ^ _mix_int(purpose))


def uniforms(key: int, step: int, lanes: int, round_: int = 0) -> np.ndarray:
    """One float64 in [0, 1) per lane for the given step.

    ``lanes`` is the number of parallel consumers (one per agent);
    ``round_`` distinguishes multiple draws at the same step.
    """
    base = _mix_int(key ^ _mix_int(step) ^ _mix_int(round_ + 1))
    lane_ids = np.arange(lanes, dtype=np.uint64)
    g = np.uint64(_GOLDEN)
    # Vectorized splitmix64 finalizer; uint64 array arithmetic wraps, which
    # is intended.
    x = lane_ids + g
    x = (x ^ (x >> np.uint64(30))) * np.uint64(_MIX1)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(_MIX2)
    lane_mix = x ^ (x >> np.uint64(31))
    y = (np.uint64(base) ^ lane_mix) + g
    y = (y ^ (y >> np.uint64(30))) * np.uint64(_MIX1)
    y = (y ^ (y >> np.uint64(27))) * np.uint64(_MIX2)
    bits = y ^ (y >> np.uint64(31))
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53
