"""Per-resident relocation costs.

A candidate housing site is scored by four terms, each evaluated against
the full enacted placement of all residents:

  affordability  1 if strictly fewer than the zoning cap of the site's
                 occupants are richer than the resident, else 0
  upkeep         1 if the site has at least one occupant, else 0
  amenity        1 minus normalized distance to the nearest amenity site
  community      1 minus the gap between the resident's endowment and the
                 proximity-squared weighted mean endowment around the site

and combined as

  cost = 1 - afford * upkeep * exp(-(lam*(1-amenity) + (1-lam)*(1-community)))

Unaffordability and abandonment are catastrophic displacement: cost is
exactly 1. Poor amenity access and poor community fit are manageable
displacement pressures: the exponent accumulates their deficits, so a
viable site costs 0 when both scores are perfect and 1 - e^{-1} (about
0.632) when both are worthless. Cost strictly falls as either score
improves, and the amenity weight trades the two pressures off against
each other.

Residents and housing sites are dense integer indices here; id mapping is
the engine's job. ``cost`` is the readable reference path; ``cost_matrix``
is the fused path the simulation loop uses. Both consume the same
per-step shared fields and must agree to 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp

import numpy as np

COMMUNITY_DENOMINATOR_FLOOR = 1e-15


class DegenerateGeometryError(RuntimeError):
    """Every resident sits at normalized distance 1 from some site, so the
    community average there is undefined. Cannot happen on a strongly
    connected graph unless the input data is broken."""


@dataclass(frozen=True)
class ModelParams:
    """Zoning cap (max residents a site is meant to hold) and the weight
    placed on amenity access versus community fit."""

    occupancy_cap: int
    amenity_weight: float

    def __post_init__(self):
        if int(self.occupancy_cap) != self.occupancy_cap or self.occupancy_cap < 1:
            raise ValueError(f"occupancy cap must be a positive integer, got {self.occupancy_cap}")
        if not 0.0 <= self.amenity_weight <= 1.0:
            raise ValueError(f"amenity weight must lie in [0, 1], got {self.amenity_weight}")


class OccupancyIndex:
    """Who lives where, with per-site occupants kept in ascending endowment
    order.

    Because endowments increase with resident index, a stable sort of
    residents by site yields per-site occupant runs already sorted by
    endowment. ``move`` relocates one resident without a full rebuild.
    """

    def __init__(self, placement: np.ndarray, n_sites: int):
        placement = np.asarray(placement, dtype=np.int64)
        if placement.ndim != 1:
            raise ValueError("placement must be 1-D (resident -> site index)")
        if placement.size and (placement.min() < 0 or placement.max() >= n_sites):
            raise ValueError("placement contains a site index out of range")
        self.n_sites = int(n_sites)
        self.placement = placement.copy()
        self.counts = np.bincount(placement, minlength=n_sites)
        self.order = np.argsort(placement, kind="stable")
        self._starts = None

    @property
    def starts(self) -> np.ndarray:
        if self._starts is None:
            self._starts = np.concatenate(([0], np.cumsum(self.counts)[:-1]))
        return self._starts

    def count(self, h: int) -> int:
        return int(self.counts[h])

    def occupants(self, h: int) -> np.ndarray:
        """Residents at site h, ascending index (hence ascending endowment)."""
        s = int(self.starts[h])
        return self.order[s : s + int(self.counts[h])]

    def occupant_endowments(self, h: int, w: np.ndarray) -> np.ndarray:
        return w[self.occupants(h)]

    def richer_count(self, j: int, h: int, w: np.ndarray) -> int:
        """Occupants of h whose endowment strictly exceeds resident j's."""
        e = self.occupant_endowments(h, w)
        return int(e.size - np.searchsorted(e, w[j], side="right"))

    def move(self, j: int, frm: int, to: int) -> None:
        """Relocate resident j between sites, keeping runs sorted."""
        if self.placement[j] != frm:
            raise ValueError(f"resident {j} is not at site {frm}")
        if frm == to:
            return
        pos_old = int(self.starts[frm]) + int(np.searchsorted(self.occupants(frm), j))
        order = np.delete(self.order, pos_old)
        self.counts[frm] -= 1
        self.placement[j] = to
        self._starts = None
        start_to = int(np.concatenate(([0], np.cumsum(self.counts)[:-1]))[to])
        pos_new = start_to + int(np.searchsorted(order[start_to : start_to + self.counts[to]], j))
        self.order = np.insert(order, pos_new, j)
        self.counts[to] += 1
        self._starts = None

    def affordability_thresholds(self, cap: int, w: np.ndarray) -> np.ndarray:
        """Per-site minimum endowment that still finds the site affordable.

        A site with fewer occupants than the cap is affordable to everyone
        (threshold -inf); otherwise the threshold is the endowment of the
        occupant ranked cap-th from the top.
        """
        theta = np.full(self.n_sites, -np.inf)
        sel = self.counts >= cap
        if np.any(sel):
            pos = self.starts[sel] + self.counts[sel] - cap
            theta[sel] = w[self.order[pos]]
        return theta


def affordability(j: int, h: int, occ: OccupancyIndex, w: np.ndarray, cap: int) -> int:
    """1 if strictly fewer than ``cap`` occupants of h out-earn resident j."""
    return 1 if occ.richer_count(j, h, w) < cap else 0


def upkeep(h: int, occ: OccupancyIndex) -> int:
    """1 if the site is occupied by anyone, 0 if abandoned."""
    return 1 if occ.counts[h] > 0 else 0


def community_field(
    placement: np.ndarray, w: np.ndarray, dist_hh: np.ndarray, sq: np.ndarray | None = None
) -> np.ndarray:
    """Proximity-squared weighted mean endowment around every housing site.

    ``dist_hh[h, h']`` is the normalized distance from candidate site h to
    site h'; nearness of a resident is the square of (1 - distance) to
    their enacted site, and every resident contributes, including any
    occupants of h itself. ``sq`` may carry a precomputed (1 - dist_hh)**2
    so hot loops skip re-deriving it.
    """
    placement = np.asarray(placement, dtype=np.int64)
    if placement.size < 1:
        raise ValueError("community field needs at least one resident")
    n_sites = dist_hh.shape[0]
    counts = np.bincount(placement, minlength=n_sites).astype(float)
    wealth = np.bincount(placement, weights=w, minlength=n_sites)
    if sq is None:
        sq = (1.0 - dist_hh) ** 2
    den = sq @ counts
    if np.any(den < COMMUNITY_DENOMINATOR_FLOOR):
        h = int(np.argmin(den))
        raise DegenerateGeometryError(
            f"community denominator vanished at site index {h}: all residents sit at "
            "normalized distance 1"
        )
    return (sq @ wealth) / den


def community_score(j: int, h: int, field: np.ndarray, w: np.ndarray) -> float:
    """1 minus the endowment gap between resident j and site h's community."""
    return 1.0 - abs(float(w[j]) - float(field[h]))


@dataclass(frozen=True)
class StepFields:
    """Shared per-step structures, all derived from one enacted placement.

    Immutable while agents are scored; rebuild (or ``occupancy.move``)
    between steps.
    """

    placement: np.ndarray
    occupancy: OccupancyIndex
    community: np.ndarray
    amenity: np.ndarray
    endowments: np.ndarray


def build_step_fields(
    placement: np.ndarray,
    endowments: np.ndarray,
    dist_hh: np.ndarray,
    amenity: np.ndarray,
    sq: np.ndarray | None = None,
) -> StepFields:
    placement = np.asarray(placement, dtype=np.int64)
    occ = OccupancyIndex(placement, dist_hh.shape[0])
    field = community_field(placement, endowments, dist_hh, sq=sq)
    return StepFields(placement, occ, field, amenity, endowments)


def cost(j: int, h: int, fields: StepFields, params: ModelParams) -> float:
    """Reference path: score one (resident, site) pair from first principles."""
    w = fields.endowments
    if not affordability(j, h, fields.occupancy, w, params.occupancy_cap):
        return 1.0
    if not upkeep(h, fields.occupancy):
        return 1.0
    lam = params.amenity_weight
    pressure = lam * (1.0 - float(fields.amenity[h])) + (1.0 - lam) * (
        1.0 - community_score(j, h, fields.community, w)
    )
    return 1.0 - exp(-pressure)


def cost_vector(j: int, fields: StepFields, params: ModelParams) -> np.ndarray:
    """Fused path, one agent: the full-information cost vector over all
    housing sites revealed to agent j for the step."""
    return _fused(fields, params, rows=np.array([j]))[0]


def cost_matrix(fields: StepFields, params: ModelParams) -> np.ndarray:
    """Fused path, all agents: row j is agent j's cost vector."""
    return _fused(fields, params, rows=None)


def _fused(fields: StepFields, params: ModelParams, rows) -> np.ndarray:
    w = fields.endowments
    wj = w if rows is None else w[rows]
    occ = fields.occupancy
    theta = occ.affordability_thresholds(params.occupancy_cap, w)
    viable = (wj[:, None] >= theta[None, :]) & (occ.counts > 0)[None, :]
    lam = params.amenity_weight
    fit_gap = np.abs(wj[:, None] - fields.community[None, :])
    inner = np.exp(-(lam * (1.0 - fields.amenity[None, :]) + (1.0 - lam) * fit_gap))
    return np.where(viable, 1.0 - inner, 1.0)
