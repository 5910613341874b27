"""Validation of emitted graph files against the format contract.

Checks run without the simulation package: schema shape, unique node ids,
known endpoints, positive finite lengths, strong connectivity, and
nonempty amenity/housing sides. The report lists every violation and the
site counts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


@dataclass
class ValidationReport:
    problems: list = field(default_factory=list)
    n_amenities: int = 0
    n_housing: int = 0
    n_arcs: int = 0

    @property
    def ok(self) -> bool:
        return not self.problems

    def lines(self) -> list:
        out = [
            f"amenity sites: {self.n_amenities}",
            f"housing sites: {self.n_housing}",
            f"arcs: {self.n_arcs}",
        ]
        if self.ok:
            out.append("OK: graph file satisfies the format contract")
        else:
            out.extend(f"FAIL: {p}" for p in self.problems)
        return out


def _strongly_connected(node_ids: set, arcs: list) -> bool:
    if len(node_ids) <= 1:
        return True
    out: dict = {nid: [] for nid in node_ids}
    rev: dict = {nid: [] for nid in node_ids}
    for tail, head in arcs:
        out[tail].append(head)
        rev[head].append(tail)
    start = min(node_ids)

    def reach(adj):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    return len(reach(out)) == len(node_ids) and len(reach(rev)) == len(node_ids)


def validate_graph_file(path) -> ValidationReport:
    report = ValidationReport()
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        report.problems.append(f"cannot parse {path}: {exc}")
        return report

    if not isinstance(doc, dict) or "nodes" not in doc or "arcs" not in doc:
        report.problems.append("missing top-level 'nodes' / 'arcs' keys")
        return report

    ids: set = set()
    for row in doc["nodes"]:
        nid = row.get("id")
        if nid is None or "lon" not in row or "lat" not in row:
            report.problems.append(f"bad node record: {row!r}")
            continue
        if nid in ids:
            report.problems.append(f"duplicate node id {nid!r}")
        ids.add(nid)
        kind = row.get("kind")
        if kind == "amenity":
            report.n_amenities += 1
        elif kind == "housing":
            report.n_housing += 1
        else:
            report.problems.append(f"node {nid!r} has unknown kind {kind!r}")

    arc_pairs = []
    for row in doc["arcs"]:
        tail, head = row.get("tail"), row.get("head")
        length = row.get("length_m")
        if tail not in ids or head not in ids:
            report.problems.append(f"arc ({tail!r} -> {head!r}) references unknown node")
            continue
        if not isinstance(length, (int, float)) or not length > 0.0 or not math.isfinite(length):
            report.problems.append(f"arc ({tail!r} -> {head!r}) has bad length {length!r}")
            continue
        arc_pairs.append((tail, head))
        report.n_arcs += 1

    if report.n_amenities == 0:
        report.problems.append("no amenity sites")
    if report.n_housing == 0:
        report.problems.append("no housing sites")
    if not report.problems and not _strongly_connected(ids, arc_pairs):
        report.problems.append("graph is not strongly connected")
    return report
