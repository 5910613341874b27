"""Raw street-network extracts.

A raw extract is a directed road graph before any site semantics: JSON
with ``nodes`` ([{id, lat, lon}]) and ``edges`` ([{u, v, length_m}]).
Extracts come either from a cached file committed next to the tests (so
everything runs offline) or live from OpenStreetMap via osmnx, which is
an optional dependency.
"""

from __future__ import annotations

import json
from dataclasses import dataclass


class ExtractError(RuntimeError):
    pass


@dataclass(frozen=True)
class RawNetwork:
    """Directed road graph: node coordinates plus length-weighted edges."""

    coords: dict  # node id -> (lat, lon)
    edges: list   # (u, v, length_m)

    def __post_init__(self):
        for u, v, length in self.edges:
            if u not in self.coords or v not in self.coords:
                raise ExtractError(f"edge ({u!r} -> {v!r}) references unknown node")
            if not length > 0.0:
                raise ExtractError(f"edge ({u!r} -> {v!r}) has non-positive length {length}")


def load_extract(path) -> RawNetwork:
    """Read a cached extract file."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ExtractError(f"cannot read extract {path}: {exc}") from exc
    try:
        coords = {str(n["id"]): (float(n["lat"]), float(n["lon"])) for n in doc["nodes"]}
        edges = [(str(e["u"]), str(e["v"]), float(e["length_m"])) for e in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ExtractError(f"malformed extract {path}: {exc}") from exc
    if len(coords) != len(doc["nodes"]):
        raise ExtractError(f"duplicate node ids in extract {path}")
    return RawNetwork(coords, edges)


def fetch_osm_extract(postal_code: str, network_type: str = "drive") -> RawNetwork:
    """Download the street network of a postal code from OpenStreetMap.

    Requires the optional osmnx dependency and network access; street
    graphs are requested by ZIP code with arc lengths in meters.
    """
    try:
        import osmnx as ox
    except ImportError as exc:
        raise ExtractError(
            "osmnx is not installed; use a cached extract (--cache) or install "
            "the [osm] extra"
        ) from exc
    try:
        graph = ox.graph_from_place(
            {"postalcode": postal_code, "country": "USA"}, network_type=network_type
        )
    except Exception as exc:  # noqa: BLE001 - network/geocoder failures vary
        raise ExtractError(f"could not retrieve region {postal_code!r}: {exc}") from exc
    coords = {str(n): (float(d["y"]), float(d["x"])) for n, d in graph.nodes(data=True)}
    edges = [
        (str(u), str(v), float(d["length"]))
        for u, v, d in graph.edges(data=True)
        if float(d.get("length", 0.0)) > 0.0
    ]
    return RawNetwork(coords, edges)


def largest_scc(network: RawNetwork) -> RawNetwork:
    """Restrict a raw network to its largest strongly connected component
    (ties broken toward the component with the smallest node id)."""
    out: dict = {nid: [] for nid in network.coords}
    rev: dict = {nid: [] for nid in network.coords}
    for u, v, _ in network.edges:
        out[u].append(v)
        rev[v].append(u)

    def reach(start, adj):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    components = []
    assigned = set()
    for nid in sorted(network.coords):
        if nid in assigned:
            continue
        comp = reach(nid, out) & reach(nid, rev)
        assigned |= comp
        components.append(comp)
    if not components:
        raise ExtractError("extract has no nodes")
    largest = max(len(c) for c in components)
    keep = min((c for c in components if len(c) == largest), key=min)
    coords = {nid: network.coords[nid] for nid in keep}
    edges = [(u, v, m) for u, v, m in network.edges if u in keep and v in keep]
    return RawNetwork(coords, edges)
