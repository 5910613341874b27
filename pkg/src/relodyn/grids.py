"""Synthetic grid instances for desk-scale runs and tests.

A rows x cols lattice with unit-length arcs in both directions between
4-neighbors, written in the standard graph file format. Node ids are
zero-padded ("r003c007") so lexicographic order equals row-major order.
"""

from __future__ import annotations

import json
import math
from pathlib import Path


def _node_id(r: int, c: int) -> str:
    return f"r{r:03d}c{c:03d}"


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def center_cell(rows: int, cols: int) -> tuple[int, int]:
    """Grid center; even dimensions round half up, so 6x6 centers at (3, 3)."""
    return _round_half_up((rows - 1) / 2.0), _round_half_up((cols - 1) / 2.0)


def parse_amenity_spec(spec, rows: int, cols: int) -> list[tuple[int, int]]:
    """Accept "center", a "r,c;r,c" string, or an iterable of (row, col)."""
    if spec == "center":
        return [center_cell(rows, cols)]
    if isinstance(spec, str):
        cells = []
        for chunk in spec.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            parts = chunk.split(",")
            if len(parts) != 2:
                raise ValueError(f"bad amenity cell {chunk!r}; expected 'row,col'")
            cells.append((int(parts[0]), int(parts[1])))
    else:
        cells = [(int(r), int(c)) for r, c in spec]
    if not cells:
        raise ValueError("amenity spec names no cells")
    return cells


def grid_document(rows: int, cols: int, amenities) -> dict:
    """Build the graph document for a bidirectional unit grid."""
    if rows < 2 or cols < 2:
        raise ValueError(f"grid must be at least 2x2, got {rows}x{cols}")
    cells = parse_amenity_spec(amenities, rows, cols)
    for r, c in cells:
        if not (0 <= r < rows and 0 <= c < cols):
            raise ValueError(f"amenity cell ({r}, {c}) outside {rows}x{cols} grid")
    amenity_set = set(cells)
    if len(amenity_set) >= rows * cols:
        raise ValueError("every cell is an amenity; no housing sites remain")

    nodes = []
    for r in range(rows):
        for c in range(cols):
            nodes.append(
                {
                    "id": _node_id(r, c),
                    "lon": float(c),
                    "lat": float(rows - 1 - r),
                    "kind": "amenity" if (r, c) in amenity_set else "housing",
                }
            )
    arcs = []
    for r in range(rows):
        for c in range(cols):
            here = _node_id(r, c)
            for dr, dc in ((0, 1), (1, 0)):
                rr, cc = r + dr, c + dc
                if rr < rows and cc < cols:
                    there = _node_id(rr, cc)
                    arcs.append({"tail": here, "head": there, "length_m": 1.0})
                    arcs.append({"tail": there, "head": here, "length_m": 1.0})
    return {"nodes": nodes, "arcs": arcs}


def generate_grid(rows: int, cols: int, amenities, path) -> Path:
    """Write a grid graph file and return its path."""
    doc = grid_document(rows, cols, amenities)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
    return path
