"""Ingest pipeline: raw network to the standard graph file.

Steps: obtain the street network (cached extract or live OSM), restrict
it to the largest strongly connected component, snap the transit stations
to their nearest surviving nodes, mark those as amenity sites and
everything else as housing, and emit the graph format the simulation
consumes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .extract import ExtractError, RawNetwork, fetch_osm_extract, largest_scc, load_extract
from .snap import snap_stations


class IngestError(RuntimeError):
    pass


@dataclass(frozen=True)
class IngestSpec:
    """What to ingest: a region (postal code or cached extract) plus the
    stations to mark as amenities, and where to write the result."""

    out_path: str
    stations: tuple  # (name, lat, lon) triples
    postal_code: str | None = None
    cache_path: str | None = None
    network_type: str = "drive"

    def __post_init__(self):
        if not self.stations:
            raise IngestError("at least one station is required")
        if self.postal_code is None and self.cache_path is None:
            raise IngestError("either a postal code or a cached extract is required")


def read_stations(path) -> tuple:
    """Parse a station CSV with columns name, lat, lon."""
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or not {"name", "lat", "lon"} <= set(reader.fieldnames):
                raise IngestError(f"{path}: expected columns name, lat, lon")
            rows = [(row["name"], float(row["lat"]), float(row["lon"])) for row in reader]
    except OSError as exc:
        raise IngestError(f"cannot read stations file {path}: {exc}") from exc
    except ValueError as exc:
        raise IngestError(f"bad station row in {path}: {exc}") from exc
    if not rows:
        raise IngestError(f"{path}: no stations")
    return tuple(rows)


def ingest(spec: IngestSpec) -> Path:
    """Run the pipeline and return the emitted graph file path."""
    try:
        if spec.cache_path is not None:
            network = load_extract(spec.cache_path)
        else:
            network = fetch_osm_extract(spec.postal_code, spec.network_type)
    except ExtractError as exc:
        raise IngestError(str(exc)) from exc

    network = largest_scc(network)
    if not network.coords:
        raise IngestError("street network is empty after connectivity restriction")

    amenity_nodes = snap_stations(list(spec.stations), network.coords)
    if not amenity_nodes:
        raise IngestError("no stations could be snapped to the network")
    if len(amenity_nodes) >= len(network.coords):
        raise IngestError("every node became an amenity; no housing sites remain")

    return write_graph_file(spec.out_path, network, amenity_nodes)


def write_graph_file(path, network: RawNetwork, amenity_nodes: set) -> Path:
    nodes = []
    for nid in sorted(network.coords):
        lat, lon = network.coords[nid]
        nodes.append(
            {
                "id": nid,
                "lon": lon,
                "lat": lat,
                "kind": "amenity" if nid in amenity_nodes else "housing",
            }
        )
    arcs = [
        {"tail": u, "head": v, "length_m": m}
        for u, v, m in sorted(network.edges)
    ]
    doc = {"nodes": nodes, "arcs": arcs}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(doc, f)
    except OSError as exc:
        raise IngestError(f"cannot write graph file {path}: {exc}") from exc
    return path
