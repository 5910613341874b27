"""Static SVG maps of a snapshot over the street graph.

Figure semantics: gray street segments, solid blue fixed-radius amenity
markers, and housing circles whose radius scales linearly with expected
population (normalized by the snapshot max) and whose fill runs along a
yellow -> orange -> red ramp over expected mean endowment, min-max
normalized across populated sites. Unpopulated sites draw at minimum
radius in neutral gray. Output is byte-deterministic for equal inputs.
"""

from __future__ import annotations

from .graphs import RoadGraph
from .snapshots import SiteSnapshot

VIEW = 800.0
MARGIN = 40.0
EDGE_COLOR = "#c8c8c8"
NEUTRAL_COLOR = "#b4b4b4"
AMENITY_COLOR = "#1565c0"
AMENITY_RADIUS = 6.0
R_MIN = 1.5
R_MAX = 9.0

_RAMP = ((255, 255, 0), (255, 165, 0), (255, 0, 0))  # yellow, orange, red


def _ramp_color(t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    if t <= 0.5:
        a, b, local = _RAMP[0], _RAMP[1], t / 0.5
    else:
        a, b, local = _RAMP[1], _RAMP[2], (t - 0.5) / 0.5
    rgb = tuple(round(x + (y - x) * local) for x, y in zip(a, b))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _projector(graph: RoadGraph):
    lons = [n.lon for n in graph.nodes]
    lats = [n.lat for n in graph.nodes]
    lon0, lon1 = min(lons), max(lons)
    lat0, lat1 = min(lats), max(lats)
    span = max(lon1 - lon0, lat1 - lat0, 1e-12)
    scale = (VIEW - 2 * MARGIN) / span

    def project(lon: float, lat: float) -> tuple[float, float]:
        x = MARGIN + (lon - lon0) * scale
        y = MARGIN + (lat1 - lat) * scale
        return x, y

    return project


def render_svg(snapshots: list[SiteSnapshot], graph: RoadGraph) -> str:
    project = _projector(graph)
    coords = {n.id: project(n.lon, n.lat) for n in graph.nodes}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW:.0f} {VIEW:.0f}">',
        f'<rect width="{VIEW:.0f}" height="{VIEW:.0f}" fill="white"/>',
    ]

    seen = set()
    for arc in sorted(graph.arcs):
        pair = (arc.tail, arc.head) if arc.tail < arc.head else (arc.head, arc.tail)
        if pair in seen:
            continue
        seen.add(pair)
        x1, y1 = coords[arc.tail]
        x2, y2 = coords[arc.head]
        parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{EDGE_COLOR}" stroke-width="1"/>'
        )

    housing = [s for s in snapshots if s.kind == "housing"]
    populated = [s for s in housing if s.populated]
    max_pop = max((s.exp_pop for s in housing), default=0.0)
    if populated:
        lo = min(s.exp_mean_endow for s in populated)
        hi = max(s.exp_mean_endow for s in populated)
    else:
        lo = hi = 0.0
    degenerate = (hi - lo) <= 0.0

    for s in housing:
        x, y = coords[s.site_id]
        share = s.exp_pop / max_pop if max_pop > 0.0 else 0.0
        radius = R_MIN + share * (R_MAX - R_MIN)
        if not s.populated:
            fill = NEUTRAL_COLOR
            radius = R_MIN
        else:
            t = 0.5 if degenerate else (s.exp_mean_endow - lo) / (hi - lo)
            fill = _ramp_color(t)
        parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius:.2f}" fill="{fill}" '
            f'data-site="{s.site_id}"/>'
        )

    for s in snapshots:
        if s.kind != "amenity":
            continue
        x, y = coords[s.site_id]
        parts.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{AMENITY_RADIUS:.2f}" '
            f'fill="{AMENITY_COLOR}" data-site="{s.site_id}"/>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, snapshots: list[SiteSnapshot], graph: RoadGraph) -> None:
    from pathlib import Path

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_svg(snapshots, graph), encoding="utf-8")
