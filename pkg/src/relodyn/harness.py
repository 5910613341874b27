"""Experiment orchestration over the (zoning cap, amenity weight) matrix.

One engine run per parameter cell, every cell sharing the same seed; each
checkpoint freezes a prefix average of the same run (or, optionally, an
independent run per checkpoint with its own step size). Outputs per cell:

    out_dir/rho{cap}_lam{weight}/T{checkpoint}/snapshot.csv
                                              /snapshot.geojson
                                              /map.svg          (--render)
    out_dir/rho{cap}_lam{weight}/manifest.json

CSV, GeoJSON and SVG bytes are a pure function of the config, so reruns
and different worker counts produce identical files.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .costs import ModelParams
from .engine import Engine, EngineConfig, SpatialInstance
from .graphs import load_graph, restrict_to_largest_scc
from .grids import generate_grid
from .population import EndowmentProfile, generate_endowments
from .render import write_svg
from .snapshots import snapshot, write_snapshot_csv, write_snapshot_geojson


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass(frozen=True)
class RunConfig:
    seed: int
    out_dir: str
    graph_path: str | None = None
    grid: tuple[int, int] | None = None
    grid_amenities: str = "center"
    residents: int | None = None
    rho_list: tuple[int, ...] = (1,)
    lambda_list: tuple[float, ...] = (0.5,)
    horizon: int = 5000
    checkpoints: tuple[int, ...] = ()
    cce_samples_per_step: int = 1
    render: bool = False
    independent_runs: bool = False
    workers: int = 1

    def __post_init__(self):
        if (self.graph_path is None) == (self.grid is None):
            raise ConfigError("exactly one of graph_path / grid must be given")
        if not self.rho_list or not self.lambda_list:
            raise ConfigError("rho and lambda lists must be nonempty")
        if any(r < 1 for r in self.rho_list):
            raise ConfigError(f"every rho must be >= 1: {self.rho_list}")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambda_list):
            raise ConfigError(f"every lambda must lie in [0, 1]: {self.lambda_list}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not self.checkpoints:
            object.__setattr__(self, "checkpoints", (self.horizon,))
        cps = tuple(int(t) for t in self.checkpoints)
        object.__setattr__(self, "checkpoints", cps)
        if any(b <= a for a, b in zip(cps, cps[1:])) or cps[-1] > self.horizon:
            raise ConfigError(
                f"checkpoints must be strictly increasing and end <= horizon: {cps}"
            )
        if self.cce_samples_per_step < 1:
            raise ConfigError(
                "cce_samples_per_step must be >= 1: the run manifest always "
                "reports an equilibrium-gap estimate"
            )
        if self.residents is not None and self.residents < 1:
            raise ConfigError(f"resident count must be >= 1, got {self.residents}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


def semantic_label(amenity_weight: float) -> str:
    """Human-readable cell label; the weight multiplies the amenity term,
    so larger values mean amenity-leaning residents."""
    if amenity_weight > 0.5:
        return "amenity-weighted"
    if amenity_weight < 0.5:
        return "community-weighted"
    return "balanced"


def cell_dir_name(cap: int, weight: float) -> str:
    return f"rho{cap}_lam{weight:g}"


def prepare_instance(config: RunConfig) -> tuple[SpatialInstance, int]:
    """Load or generate the graph, restrict it, and precompute distances."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config.grid is not None:
        rows, cols = config.grid
        try:
            path = generate_grid(rows, cols, config.grid_amenities, out / "graph.json")
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    else:
        path = Path(config.graph_path)
    graph, partition = load_graph(path)
    graph, partition = restrict_to_largest_scc(graph, partition)
    instance = SpatialInstance.from_graph(graph, partition)
    residents = config.residents if config.residents is not None else instance.n_housing
    return instance, residents


@dataclass
class CellResult:
    directory: Path
    max_regret: float
    cce_gap: float
    cce_gap_std_error: float
    wall_clock_s: float


def _write_outputs(cell_dir: Path, engine: Engine, t: int, render: bool) -> list:
    snaps = snapshot(engine.accumulator, t, engine.instance)
    total = sum(s.exp_pop for s in snaps)
    if abs(total - engine.n_agents) > 1e-6 * engine.n_agents:
        raise RuntimeError(
            f"population mass not conserved at T={t}: {total} != {engine.n_agents}"
        )
    tdir = cell_dir / f"T{t}"
    write_snapshot_csv(tdir / "snapshot.csv", snaps)
    write_snapshot_geojson(tdir / "snapshot.geojson", snaps)
    if render:
        write_svg(tdir / "map.svg", snaps, engine.instance.graph)
    return snaps


def run_cell(
    instance: SpatialInstance,
    endowments: EndowmentProfile,
    config: RunConfig,
    cap: int,
    weight: float,
) -> CellResult:
    """One dynamics run (or one per checkpoint) plus its exported files."""
    started = time.perf_counter()
    cell_dir = Path(config.out_dir) / cell_dir_name(cap, weight)
    cell_dir.mkdir(parents=True, exist_ok=True)
    params = ModelParams(occupancy_cap=cap, amenity_weight=weight)

    final_engine = None
    if config.independent_runs:
        for t in config.checkpoints:
            engine = Engine(
                instance,
                endowments,
                EngineConfig(params, t, (t,), config.seed, config.cce_samples_per_step),
            )
            engine.run()
            _write_outputs(cell_dir, engine, t, config.render)
            final_engine = engine
    else:
        engine = Engine(
            instance,
            endowments,
            EngineConfig(
                params, config.horizon, config.checkpoints, config.seed,
                config.cce_samples_per_step,
            ),
        )
        for t in config.checkpoints:
            engine.run(until=t)
            _write_outputs(cell_dir, engine, t, config.render)
        final_engine = engine

    regrets = final_engine.regrets()
    gap = final_engine.estimate_cce_gap()
    wall = time.perf_counter() - started
    manifest = {
        "cell": {
            "rho": cap,
            "lambda": weight,
            "label": semantic_label(weight),
            "mode": "independent" if config.independent_runs else "prefix",
        },
        "config": {
            "seed": config.seed,
            "graph_path": config.graph_path,
            "grid": list(config.grid) if config.grid else None,
            "grid_amenities": config.grid_amenities,
            "residents": len(endowments),
            "horizon": config.horizon,
            "checkpoints": list(config.checkpoints),
            "cce_samples_per_step": config.cce_samples_per_step,
            "render": config.render,
        },
        "counts": {
            "amenities": len(instance.amenity_ids),
            "housing": instance.n_housing,
            "residents": len(endowments),
        },
        "step_size": final_engine.step_size,
        "endowments": [float(x) for x in endowments.w],
        "per_agent_regret": [float(r) for r in regrets],
        "max_regret": float(regrets.max()),
        "cce_gap": gap.gap,
        "cce_gap_raw": gap.raw_gap,
        "cce_gap_std_error": gap.std_error,
        "cce_samples": gap.samples,
        "wall_clock_s": wall,
    }
    with open(cell_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)

    return CellResult(cell_dir, float(regrets.max()), gap.gap, gap.std_error, wall)


def _cell_job(payload) -> str:
    instance, endowments, config, cap, weight = payload
    return str(run_cell(instance, endowments, config, cap, weight).directory)


def run_matrix(config: RunConfig) -> list[Path]:
    """Run every (cap, weight) cell and return the cell directories."""
    instance, n_residents = prepare_instance(config)
    endowments = generate_endowments(n_residents)
    cells = [(cap, weight) for cap in config.rho_list for weight in config.lambda_list]

    if config.workers > 1 and len(cells) > 1:
        payloads = [(instance, endowments, config, cap, weight) for cap, weight in cells]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            dirs = list(pool.map(_cell_job, payloads))
        return [Path(d) for d in dirs]

    return [
        run_cell(instance, endowments, config, cap, weight).directory
        for cap, weight in cells
    ]
