"""Street-graph loading, strong-connectivity restriction and normalized
shortest-path distances.

The graph file is a JSON document with two top-level keys::

    nodes: [{"id": str, "lon": float, "lat": float, "kind": "amenity"|"housing"}]
    arcs:  [{"tail": str, "head": str, "length_m": float > 0}]

Node kind splits the graph into amenity sites and housing sites. All
distance work happens on the largest strongly connected component so that
every ordered pair has a finite shortest path; distances are then divided
by the directed diameter, giving values in [0, 1].
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np


class GraphFormatError(ValueError):
    """A graph file violates the format contract."""


class GraphNode(NamedTuple):
    id: str
    lon: float
    lat: float


class Arc(NamedTuple):
    tail: str
    head: str
    length_m: float


@dataclass(frozen=True)
class RoadGraph:
    """Directed street graph with arc lengths in meters."""

    nodes: tuple[GraphNode, ...]
    arcs: tuple[Arc, ...]

    def node_ids(self) -> list[str]:
        return sorted(n.id for n in self.nodes)

    def adjacency(self) -> dict[str, list[tuple[str, float]]]:
        """Outgoing (head, length) lists; parallel arcs keep the shortest."""
        best: dict[tuple[str, str], float] = {}
        for a in self.arcs:
            key = (a.tail, a.head)
            if key not in best or a.length_m < best[key]:
                best[key] = a.length_m
        adj: dict[str, list[tuple[str, float]]] = {n.id: [] for n in self.nodes}
        for (tail, head), length in sorted(best.items()):
            adj[tail].append((head, length))
        return adj


@dataclass(frozen=True)
class SitePartition:
    """Disjoint split of the graph's nodes into amenity and housing sites."""

    amenities: frozenset[str]
    housing: frozenset[str]


@dataclass(frozen=True)
class NormalizedDistances:
    """Dense matrix of shortest-path distances divided by the directed
    diameter. Rows/columns follow ``node_ids`` (sorted); entry (u, v) is the
    normalized distance from u to v, and asymmetry is allowed."""

    node_ids: tuple[str, ...]
    matrix: np.ndarray
    diameter_m: float

    def index_of(self, node_id: str) -> int:
        i = self._index.get(node_id)
        if i is None:
            raise KeyError(f"unknown node id: {node_id!r}")
        return i

    def between(self, u: str, v: str) -> float:
        return float(self.matrix[self.index_of(u), self.index_of(v)])

    @property
    def _index(self) -> dict[str, int]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {nid: i for i, nid in enumerate(self.node_ids)}
            object.__setattr__(self, "_index_cache", cached)
        return cached


def load_graph(path) -> tuple[RoadGraph, SitePartition]:
    """Parse a graph file and split its nodes by kind.

    Raises GraphFormatError on malformed JSON, duplicate node ids, arcs
    referencing unknown nodes, non-positive or non-finite lengths, or an
    empty amenity/housing side.
    """
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise GraphFormatError(f"cannot parse graph file {path}: {exc}") from exc
    return parse_graph(doc, source=str(path))


def parse_graph(doc, source: str = "<memory>") -> tuple[RoadGraph, SitePartition]:
    if not isinstance(doc, dict) or "nodes" not in doc or "arcs" not in doc:
        raise GraphFormatError(f"{source}: expected top-level keys 'nodes' and 'arcs'")

    nodes: list[GraphNode] = []
    amenities: set[str] = set()
    housing: set[str] = set()
    seen: set[str] = set()
    for row in doc["nodes"]:
        try:
            nid = str(row["id"])
            lon = float(row["lon"])
            lat = float(row["lat"])
            kind = row["kind"]
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"{source}: bad node record {row!r}") from exc
        if nid in seen:
            raise GraphFormatError(f"{source}: duplicate node id {nid!r}")
        seen.add(nid)
        if kind == "amenity":
            amenities.add(nid)
        elif kind == "housing":
            housing.add(nid)
        else:
            raise GraphFormatError(f"{source}: node {nid!r} has unknown kind {kind!r}")
        nodes.append(GraphNode(nid, lon, lat))

    arcs: list[Arc] = []
    for row in doc["arcs"]:
        try:
            tail = str(row["tail"])
            head = str(row["head"])
            length = float(row["length_m"])
        except (KeyError, TypeError, ValueError) as exc:
            raise GraphFormatError(f"{source}: bad arc record {row!r}") from exc
        if tail not in seen or head not in seen:
            raise GraphFormatError(f"{source}: arc ({tail!r} -> {head!r}) references unknown node")
        if not (length > 0.0) or not np.isfinite(length):
            raise GraphFormatError(
                f"{source}: non-positive length on arc ({tail!r} -> {head!r}): {length}"
            )
        arcs.append(Arc(tail, head, length))

    if not amenities:
        raise GraphFormatError(f"{source}: no amenity sites")
    if not housing:
        raise GraphFormatError(f"{source}: no housing sites")

    graph = RoadGraph(tuple(nodes), tuple(arcs))
    partition = SitePartition(frozenset(amenities), frozenset(housing))
    return graph, partition


def strongly_connected_components(graph: RoadGraph) -> list[set[str]]:
    """Tarjan's algorithm, iterative. Deterministic: roots are visited in
    sorted node-id order."""
    adj = graph.adjacency()
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[set[str]] = []
    counter = 0

    for root in sorted(adj):
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, edge_i = work[-1]
            if edge_i == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            neighbors = adj[node]
            while edge_i < len(neighbors):
                head = neighbors[edge_i][0]
                edge_i += 1
                if head not in index:
                    work[-1] = (node, edge_i)
                    work.append((head, 0))
                    advanced = True
                    break
                if head in on_stack:
                    lowlink[node] = min(lowlink[node], index[head])
            if advanced:
                continue
            work.pop()
            if lowlink[node] == index[node]:
                comp: set[str] = set()
                while True:
                    top = stack.pop()
                    on_stack.discard(top)
                    comp.add(top)
                    if top == node:
                        break
                components.append(comp)
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return components


def restrict_to_largest_scc(
    graph: RoadGraph, partition: SitePartition
) -> tuple[RoadGraph, SitePartition]:
    """Drop every node outside the largest strongly connected component.

    Size ties are broken toward the component containing the
    lexicographically smallest node id, so the result is deterministic.
    Raises GraphFormatError if the surviving component has no amenity or no
    housing site.
    """
    components = strongly_connected_components(graph)
    largest = max(len(c) for c in components)
    tied = [c for c in components if len(c) == largest]
    keep = min(tied, key=min)

    nodes = tuple(n for n in graph.nodes if n.id in keep)
    arcs = tuple(a for a in graph.arcs if a.tail in keep and a.head in keep)
    amenities = frozenset(partition.amenities & keep)
    housing = frozenset(partition.housing & keep)
    if not amenities:
        raise GraphFormatError("largest strongly connected component has no amenity sites")
    if not housing:
        raise GraphFormatError("largest strongly connected component has no housing sites")
    return RoadGraph(nodes, arcs), SitePartition(amenities, housing)


def _dijkstra(adj_idx: list[list[tuple[int, float]]], source: int, n: int) -> np.ndarray:
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, length in adj_idx[u]:
            nd = d + length
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def compute_normalized_distances(graph: RoadGraph) -> NormalizedDistances:
    """All-pairs shortest paths divided by the directed diameter.

    Requires a strongly connected graph; an unreachable pair raises
    GraphFormatError. A single-node graph yields the 1x1 zero matrix.
    """
    ids = graph.node_ids()
    n = len(ids)
    pos = {nid: i for i, nid in enumerate(ids)}
    adj_idx: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for tail, out in graph.adjacency().items():
        adj_idx[pos[tail]] = [(pos[head], length) for head, length in out]

    matrix = np.empty((n, n))
    for i in range(n):
        matrix[i] = _dijkstra(adj_idx, i, n)
    if not np.all(np.isfinite(matrix)):
        bad = np.argwhere(~np.isfinite(matrix))[0]
        raise GraphFormatError(
            f"graph is not strongly connected: no path {ids[bad[0]]!r} -> {ids[bad[1]]!r}"
        )
    diameter = float(matrix.max())
    if diameter > 0.0:
        matrix /= diameter
    matrix.flags.writeable = False
    return NormalizedDistances(tuple(ids), matrix, diameter)


def amenity_score(h: str, amenities: Iterable[str], dist: NormalizedDistances) -> float:
    """Proximity of a housing site to its nearest amenity: 1 minus the
    smallest normalized distance to any amenity site."""
    ids = list(amenities)
    if not ids:
        raise ValueError("amenity set is empty")
    row = dist.matrix[dist.index_of(h)]
    return 1.0 - min(float(row[dist.index_of(f)]) for f in ids)


def amenity_scores(
    dist: NormalizedDistances, partition: SitePartition, node_ids: Iterable[str]
) -> np.ndarray:
    """Vector of amenity scores for ``node_ids``, in that order."""
    f_idx = [dist.index_of(f) for f in sorted(partition.amenities)]
    rows = [dist.index_of(v) for v in node_ids]
    sub = dist.matrix[np.ix_(rows, f_idx)]
    return 1.0 - sub.min(axis=1)
