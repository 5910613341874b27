"""Spatial summary metrics over snapshots.

These quantify the qualitative patterns of interest: whether wealth sorts
toward amenity access, how concentrated the population is around
amenities, and how financially segregated the housing stock is.
"""

from __future__ import annotations

import numpy as np

from .snapshots import SiteSnapshot


def _ranks(x: np.ndarray) -> np.ndarray:
    # Average ranks for ties.
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    sx = x[order]
    i = 0
    while i < len(sx):
        j = i
        while j + 1 < len(sx) and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Rank correlation (average ranks on ties)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ValueError("need two same-length vectors of size >= 2")
    rx, ry = _ranks(x), _ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx * rx).sum() * (ry * ry).sum())
    if denom == 0.0:
        raise ValueError("rank correlation undefined for a constant vector")
    return float((rx * ry).sum() / denom)


def weighted_mean(values, weights) -> float:
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    total = weights.sum()
    if total <= 0.0:
        raise ValueError("weights sum to zero")
    return float((values * weights).sum() / total)


def weighted_variance(values, weights) -> float:
    mean = weighted_mean(values, weights)
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    return float((weights * (values - mean) ** 2).sum() / weights.sum())


def _housing(snapshots: list[SiteSnapshot]) -> list[SiteSnapshot]:
    return [s for s in snapshots if s.kind == "housing"]


def pop_weighted_mean_amenity(snapshots: list[SiteSnapshot]) -> float:
    """Expected amenity score of a randomly drawn resident: how near to
    transit the population sits on average."""
    housing = _housing(snapshots)
    return weighted_mean(
        [s.amenity_score for s in housing], [s.exp_pop for s in housing]
    )


def segregation_index(snapshots: list[SiteSnapshot]) -> float:
    """Population-weighted variance of expected mean endowment across
    populated housing sites; higher means more financially segregated."""
    populated = [s for s in _housing(snapshots) if s.populated]
    return weighted_variance(
        [s.exp_mean_endow for s in populated], [s.exp_pop for s in populated]
    )


def endowment_decile_amenity(
    snapshots: list[SiteSnapshot], decile: float = 0.1
) -> tuple[float, float]:
    """Mean amenity score (population-weighted) of the bottom and top
    endowment deciles.

    Populated housing sites are sorted by expected mean endowment; the
    bottom (top) decile is the smallest prefix (suffix) holding at least
    ``decile`` of the expected population.
    """
    populated = sorted(
        (s for s in _housing(snapshots) if s.populated),
        key=lambda s: (s.exp_mean_endow, s.site_id),
    )
    if not populated:
        raise ValueError("no populated housing sites")
    total = sum(s.exp_pop for s in populated)

    def take(ordered):
        mass = 0.0
        picked = []
        for s in ordered:
            picked.append(s)
            mass += s.exp_pop
            if mass >= decile * total:
                break
        return weighted_mean(
            [s.amenity_score for s in picked], [s.exp_pop for s in picked]
        )

    return take(populated), take(list(reversed(populated)))


def top_amenity_population_share(
    snapshots: list[SiteSnapshot], decile: float = 0.1
) -> float:
    """Share of expected population living in the top decile (by count) of
    housing sites ranked by amenity score."""
    housing = sorted(_housing(snapshots), key=lambda s: (-s.amenity_score, s.site_id))
    if not housing:
        raise ValueError("no housing sites")
    k = max(1, int(np.ceil(decile * len(housing))))
    total = sum(s.exp_pop for s in housing)
    if total <= 0.0:
        raise ValueError("no expected population")
    return sum(s.exp_pop for s in housing[:k]) / total
