"""Snapping station coordinates to network nodes."""

from __future__ import annotations

import logging
import math

log = logging.getLogger(__name__)

EARTH_RADIUS_M = 6_371_008.8


def great_circle_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Haversine distance in meters."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2.0) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(a))


def nearest_node(lat: float, lon: float, coords: dict) -> str:
    """Closest node by great-circle distance; ties break to the smallest id."""
    best_id = None
    best = math.inf
    for nid in sorted(coords):
        nlat, nlon = coords[nid]
        d = great_circle_m(lat, lon, nlat, nlon)
        if d < best:
            best = d
            best_id = nid
    if best_id is None:
        raise ValueError("cannot snap to an empty network")
    return best_id


def snap_stations(stations: list, coords: dict) -> set:
    """Map stations to their nearest nodes, deduplicating collisions.

    ``stations`` holds (name, lat, lon) triples; returns the set of snapped
    node ids. Two stations landing on one node log a warning and count once.
    """
    snapped: dict = {}
    for name, lat, lon in stations:
        nid = nearest_node(lat, lon, coords)
        if nid in snapped:
            log.warning("station %r snaps to node %s already taken by %r; deduplicated",
                        name, nid, snapped[nid])
        else:
            snapped[nid] = name
    return set(snapped)
