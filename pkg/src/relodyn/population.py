"""Resident endowments.

Wealth is summarized by a concave cumulative-share curve of the Rasche
family, y = 1 - (1 - x)^alpha with alpha = 1/2 (and unit outer exponent).
Endowments are consecutive differences of that curve at uniformly spaced
interior points, which makes them strictly increasing and distinct.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CURVE_ALPHA = 0.5
CURVE_BETA = 1.0


@dataclass(frozen=True)
class EndowmentProfile:
    """Strictly increasing resident wealth vector; entry j is resident j's
    endowment, each strictly inside (0, 1), with total below 1."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("endowment vector must be non-empty and 1-D")
        if not (np.all(w > 0.0) and np.all(w < 1.0)):
            raise ValueError("endowments must lie strictly inside (0, 1)")
        if not np.all(np.diff(w) > 0.0):
            raise ValueError("endowments must be strictly increasing")
        if float(w.sum()) >= 1.0:
            raise ValueError("endowments must sum to less than 1")

    def __len__(self) -> int:
        return int(self.w.size)


def lorenz(x: float) -> float:
    """Cumulative wealth share held by the poorest fraction x of residents."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"population fraction out of [0, 1]: {x}")
    return (1.0 - (1.0 - x) ** CURVE_ALPHA) ** CURVE_BETA


def generate_endowments(n: int) -> EndowmentProfile:
    """Endowments for n residents from consecutive curve differences.

    Sample points are x_i = i / (n + 2) for i = 1..n+1, all strictly
    interior; resident j receives lorenz(x_{j+1}) - lorenz(x_j). Convexity
    of the curve makes the result strictly increasing, so a larger resident
    index always means a richer resident. Deterministic.
    """
    if n < 1:
        raise ValueError(f"resident count must be >= 1, got {n}")
    points = np.arange(1, n + 2, dtype=float) / float(n + 2)
    values = (1.0 - (1.0 - points) ** CURVE_ALPHA) ** CURVE_BETA
    return EndowmentProfile(np.diff(values))
