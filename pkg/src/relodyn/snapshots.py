"""Checkpoint snapshots of the time-averaged outcome and their CSV /
GeoJSON serializations.

Floats are written with repr(), which round-trips exactly, so parsing an
emitted CSV reproduces the in-memory snapshot list bit for bit.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .engine import EquilibriumAccumulator, SpatialInstance

UNPOPULATED_EPS = 1e-9

CSV_COLUMNS = (
    "site_id",
    "lon",
    "lat",
    "kind",
    "amenity_score",
    "exp_pop",
    "exp_total_endow",
    "exp_mean_endow",
    "populated_flag",
)


@dataclass(frozen=True)
class SiteSnapshot:
    """Per-site expected statistics under the time-averaged outcome at one
    checkpoint. Amenity rows carry zeros for the expectation fields."""

    site_id: str
    lon: float
    lat: float
    kind: str
    amenity_score: float
    exp_pop: float
    exp_total_endow: float
    exp_mean_endow: float
    populated: bool


def snapshot(
    accumulator: EquilibriumAccumulator, t: int, instance: SpatialInstance
) -> list[SiteSnapshot]:
    """Snapshot at a recorded checkpoint, rows sorted by site id.

    exp_mean_endow is the ratio of expected endowment mass to expected
    population, guarded at zero population: sites whose expected
    population falls below 1e-9 report 0 and are flagged unpopulated.
    """
    if t not in accumulator.frozen:
        raise ValueError(f"step {t} is not a recorded checkpoint")
    pop, wealth = accumulator.frozen[t]
    coords = {n.id: (n.lon, n.lat) for n in instance.graph.nodes}

    rows = []
    for i, site_id in enumerate(instance.housing_ids):
        lon, lat = coords[site_id]
        exp_pop = float(pop[i])
        exp_total = float(wealth[i])
        populated = exp_pop > UNPOPULATED_EPS
        mean = exp_total / max(exp_pop, UNPOPULATED_EPS) if populated else 0.0
        rows.append(
            SiteSnapshot(
                site_id, lon, lat, "housing",
                float(instance.amenity[i]), exp_pop, exp_total, mean, populated,
            )
        )
    for site_id in instance.amenity_ids:
        lon, lat = coords[site_id]
        rows.append(SiteSnapshot(site_id, lon, lat, "amenity", 1.0, 0.0, 0.0, 0.0, False))
    rows.sort(key=lambda s: s.site_id)
    return rows


def write_snapshot_csv(path, snapshots: list[SiteSnapshot]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_COLUMNS)
        for s in snapshots:
            writer.writerow(
                [
                    s.site_id,
                    repr(s.lon),
                    repr(s.lat),
                    s.kind,
                    repr(s.amenity_score),
                    repr(s.exp_pop),
                    repr(s.exp_total_endow),
                    repr(s.exp_mean_endow),
                    "1" if s.populated else "0",
                ]
            )


def read_snapshot_csv(path) -> list[SiteSnapshot]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected snapshot CSV header {header}")
        out = []
        for row in reader:
            out.append(
                SiteSnapshot(
                    site_id=row[0],
                    lon=float(row[1]),
                    lat=float(row[2]),
                    kind=row[3],
                    amenity_score=float(row[4]),
                    exp_pop=float(row[5]),
                    exp_total_endow=float(row[6]),
                    exp_mean_endow=float(row[7]),
                    populated=row[8] == "1",
                )
            )
    return out


def write_snapshot_geojson(path, snapshots: list[SiteSnapshot]) -> None:
    features = []
    for s in snapshots:
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [s.lon, s.lat]},
                "properties": {
                    "site_id": s.site_id,
                    "kind": s.kind,
                    "amenity_score": s.amenity_score,
                    "exp_pop": s.exp_pop,
                    "exp_total_endow": s.exp_total_endow,
                    "exp_mean_endow": s.exp_mean_endow,
                    "populated_flag": s.populated,
                },
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
