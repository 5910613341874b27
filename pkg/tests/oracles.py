"""Independent brute-force oracles used by the test suite.

Everything here is written straight from the defining formulas with plain
Python loops, deliberately sharing no code with the package paths it
checks.
"""

from __future__ import annotations

import math
import random

import numpy as np


def bellman_ford_all_pairs(n: int, arcs: list[tuple[int, int, float]]) -> np.ndarray:
    """All-pairs shortest paths by repeated edge relaxation."""
    d = [[math.inf] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = 0.0
    changed = True
    while changed:
        changed = False
        for u, v, length in arcs:
            for s in range(n):
                cand = d[s][u] + length
                if cand < d[s][v]:
                    d[s][v] = cand
                    changed = True
    return np.array(d)


def scc_by_reachability(n: int, arcs: list[tuple[int, int]]) -> list[frozenset[int]]:
    """Strongly connected components from mutual reachability, by BFS."""
    out = [[] for _ in range(n)]
    for u, v in arcs:
        out[u].append(v)

    def reach(s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for v in out[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    reaches = [reach(i) for i in range(n)]
    comps = []
    assigned = set()
    for i in range(n):
        if i in assigned:
            continue
        comp = {j for j in range(n) if j in reaches[i] and i in reaches[j]}
        assigned |= comp
        comps.append(frozenset(comp))
    return comps


def naive_community_field(
    placement: list[int], w: list[float], dist_hh: np.ndarray
) -> list[float]:
    n_sites = dist_hh.shape[0]
    out = []
    for h in range(n_sites):
        num = 0.0
        den = 0.0
        for j, site in enumerate(placement):
            s = (1.0 - float(dist_hh[h, site])) ** 2
            num += w[j] * s
            den += s
        out.append(num / den)
    return out


def naive_cost(
    j: int,
    h: int,
    placement: list[int],
    w: list[float],
    dist_hh: np.ndarray,
    amenity: list[float],
    cap: int,
    lam: float,
    field: list[float] | None = None,
) -> float:
    richer = sum(1 for j2, site in enumerate(placement) if site == h and w[j2] > w[j])
    occupied = any(site == h for site in placement)
    if richer >= cap or not occupied:
        return 1.0
    m = naive_community_field(placement, w, dist_hh)[h] if field is None else field[h]
    fit = 1.0 - abs(w[j] - m)
    pressure = lam * (1.0 - float(amenity[h])) + (1.0 - lam) * (1.0 - fit)
    return 1.0 - math.exp(-pressure)


def naive_cost_matrix(
    placement: list[int],
    w: list[float],
    dist_hh: np.ndarray,
    amenity: list[float],
    cap: int,
    lam: float,
) -> np.ndarray:
    field = naive_community_field(placement, w, dist_hh)
    n_sites = dist_hh.shape[0]
    return np.array(
        [
            [naive_cost(j, h, placement, w, dist_hh, amenity, cap, lam, field) for h in range(n_sites)]
            for j in range(len(placement))
        ]
    )


def random_strong_graph_doc(
    rng: random.Random, n: int, extra_arcs: int | None = None, n_amenities: int = 1
) -> dict:
    """Random strongly connected graph document: a ring plus chords."""
    if extra_arcs is None:
        extra_arcs = n
    nodes = [
        {
            "id": f"n{i:03d}",
            "lon": rng.uniform(-74.0, -73.9),
            "lat": rng.uniform(40.6, 40.7),
            "kind": "amenity" if i < n_amenities else "housing",
        }
        for i in range(n)
    ]
    arcs = [
        {"tail": f"n{i:03d}", "head": f"n{(i + 1) % n:03d}", "length_m": rng.uniform(20.0, 900.0)}
        for i in range(n)
    ]
    for _ in range(extra_arcs):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            arcs.append(
                {"tail": f"n{u:03d}", "head": f"n{v:03d}", "length_m": rng.uniform(20.0, 900.0)}
            )
    return {"nodes": nodes, "arcs": arcs}


def arcs_as_index_tuples(doc: dict) -> tuple[int, list[tuple[int, int, float]]]:
    """Graph document arcs as (tail, head, length) index triples, with the
    node order matching sorted ids (the package's matrix order)."""
    ids = sorted(n["id"] for n in doc["nodes"])
    pos = {nid: i for i, nid in enumerate(ids)}
    arcs = [(pos[a["tail"]], pos[a["head"]], a["length_m"]) for a in doc["arcs"]]
    return len(ids), arcs
