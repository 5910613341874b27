"""Built-in property checks on a small synthetic instance (--verify).

A quick standalone sanity suite for installed environments: each check
prints one PASS/FAIL line. The pytest suite is the authoritative, larger
version of these properties.
"""

from __future__ import annotations

import math
import random

import numpy as np

from .costs import ModelParams, build_step_fields, cost, cost_matrix
from .engine import Engine, EngineConfig, SpatialInstance
from .graphs import compute_normalized_distances, parse_graph, restrict_to_largest_scc
from .grids import grid_document
from .population import generate_endowments


def _brute_force_distances(n: int, arcs: list[tuple[int, int, float]]) -> np.ndarray:
    # Bellman-Ford relaxation to fixpoint; independent of the Dijkstra path.
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    changed = True
    while changed:
        changed = False
        for u, v, length in arcs:
            improved = d[:, u] + length < d[:, v]
            if improved.any():
                d[improved, v] = d[improved, u] + length
                changed = True
    return d


def _check_endowments() -> bool:
    for n in (1, 7, 200):
        w = generate_endowments(n).w
        if not (np.all(np.diff(w) > 0) and 0 < w[0] and w[-1] < 1 and w.sum() < 1):
            return False
    return True


def _check_distances(rng: random.Random) -> bool:
    for _ in range(5):
        n = rng.randint(4, 10)
        arcs = []
        for i in range(n):
            arcs.append((i, (i + 1) % n, rng.uniform(10, 500)))
        for _ in range(n):
            u, v = rng.randrange(n), rng.randrange(n)
            if u != v:
                arcs.append((u, v, rng.uniform(10, 500)))
        doc = {
            "nodes": [
                {"id": f"n{i:02d}", "lon": float(i), "lat": 0.0,
                 "kind": "amenity" if i == 0 else "housing"}
                for i in range(n)
            ],
            "arcs": [
                {"tail": f"n{u:02d}", "head": f"n{v:02d}", "length_m": w}
                for u, v, w in arcs
            ],
        }
        graph, _ = parse_graph(doc)
        dist = compute_normalized_distances(graph)
        oracle = _brute_force_distances(n, arcs)
        oracle /= oracle.max()
        if not np.allclose(dist.matrix, oracle, rtol=1e-12, atol=1e-12):
            return False
    return True


def _check_costs(rng: random.Random) -> bool:
    doc = grid_document(3, 3, "center")
    graph, partition = parse_graph(doc)
    graph, partition = restrict_to_largest_scc(graph, partition)
    instance = SpatialInstance.from_graph(graph, partition)
    w = generate_endowments(6).w
    for _ in range(25):
        placement = np.array([rng.randrange(instance.n_housing) for _ in range(6)])
        params = ModelParams(rng.choice([1, 2, 3]), rng.choice([0.0, 0.25, 0.75, 1.0]))
        fields = build_step_fields(placement, w, instance.dist_hh, instance.amenity)
        fused = cost_matrix(fields, params)
        for j in range(6):
            for h in range(instance.n_housing):
                ref = cost(j, h, fields, params)
                if abs(ref - fused[j, h]) > 1e-12 or not 0.0 <= ref <= 1.0:
                    return False
    return True


def _check_dynamics() -> bool:
    doc = grid_document(4, 4, "center")
    graph, partition = parse_graph(doc)
    graph, partition = restrict_to_largest_scc(graph, partition)
    instance = SpatialInstance.from_graph(graph, partition)
    endow = generate_endowments(10)
    config = EngineConfig(ModelParams(2, 0.5), 200, (100, 200), seed=7)

    engines = [Engine(instance, endow, config) for _ in range(2)]
    for engine in engines:
        engine.run()
        if np.abs(engine.p.sum(axis=1) - 1.0).max() > 1e-9:
            return False
        total = engine.accumulator.pop_acc.sum()
        if abs(total - 200 * 10) > 1e-6 * 200 * 10:
            return False
    a, b = engines
    return (
        np.array_equal(a.logw, b.logw)
        and np.array_equal(a.ledger.realized_cum, b.ledger.realized_cum)
        and a.estimate_cce_gap() == b.estimate_cce_gap()
    )


def _check_regret_arithmetic() -> bool:
    return math.isclose((10.0 - 6.0) / 100.0, 0.04)


def run_verification(print_fn=print) -> bool:
    rng = random.Random(20240817)
    checks = [
        ("endowments strictly increasing, interior, mass < 1", _check_endowments),
        ("normalized distances match brute-force oracle", lambda: _check_distances(rng)),
        ("fused cost path matches reference path", lambda: _check_costs(rng)),
        ("dynamics normalized, conserving, deterministic", _check_dynamics),
        ("regret arithmetic", _check_regret_arithmetic),
    ]
    ok = True
    for name, fn in checks:
        passed = bool(fn())
        ok &= passed
        print_fn(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
