import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from relodyn.costs import ModelParams
from relodyn.engine import Engine, EngineConfig, EquilibriumAccumulator, SpatialInstance
from relodyn.graphs import load_graph, parse_graph, restrict_to_largest_scc
from relodyn.grids import center_cell, generate_grid, grid_document
from relodyn.harness import (
    ConfigError,
    RunConfig,
    cell_dir_name,
    run_matrix,
    semantic_label,
)
from relodyn.population import generate_endowments
from relodyn.render import AMENITY_COLOR, render_svg
from relodyn.snapshots import (
    SiteSnapshot,
    read_snapshot_csv,
    snapshot,
    write_snapshot_csv,
    write_snapshot_geojson,
)


def small_run_config(tmp_path, **overrides):
    base = dict(
        seed=42,
        out_dir=str(tmp_path / "out"),
        grid=(3, 3),
        grid_amenities="center",
        residents=6,
        rho_list=(2,),
        lambda_list=(0.5,),
        horizon=30,
        checkpoints=(15, 30),
        cce_samples_per_step=1,
    )
    base.update(overrides)
    return RunConfig(**base)


class TestGridGeneration:
    def test_2x2_structure(self, tmp_path):
        path = generate_grid(2, 2, [(0, 0)], tmp_path / "g.json")
        doc = json.loads(path.read_text())
        assert len(doc["nodes"]) == 4
        assert len(doc["arcs"]) == 8
        kinds = {n["id"]: n["kind"] for n in doc["nodes"]}
        assert sum(1 for k in kinds.values() if k == "amenity") == 1
        assert sum(1 for k in kinds.values() if k == "housing") == 3

    def test_center_rounds_half_up(self, tmp_path):
        assert center_cell(6, 6) == (3, 3)
        assert center_cell(3, 3) == (1, 1)
        path = generate_grid(6, 6, "center", tmp_path / "g.json")
        doc = json.loads(path.read_text())
        amenities = [n["id"] for n in doc["nodes"] if n["kind"] == "amenity"]
        assert amenities == ["r003c003"]

    def test_all_amenities_rejected(self):
        cells = [(r, c) for r in range(3) for c in range(3)]
        with pytest.raises(ValueError, match="no housing"):
            grid_document(3, 3, cells)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError, match="outside"):
            grid_document(3, 3, [(5, 0)])

    def test_too_small_rejected(self):
        with pytest.raises(ValueError, match="at least 2x2"):
            grid_document(1, 5, "center")

    def test_generated_grid_loads_strongly_connected(self, tmp_path):
        path = generate_grid(4, 5, "center", tmp_path / "g.json")
        graph, partition = load_graph(path)
        graph2, partition2 = restrict_to_largest_scc(graph, partition)
        assert len(graph2.nodes) == len(graph.nodes)


def _uniform_engine(n_residents=4, horizon=1):
    # The configured horizon stays >= 10 so the step size is valid even
    # when the test only advances one step to a checkpoint.
    graph, partition = parse_graph(grid_document(3, 3, "center"))
    instance = SpatialInstance.from_graph(graph, partition)
    endow = generate_endowments(n_residents)
    engine = Engine(instance, endow,
                    EngineConfig(ModelParams(2, 0.5), max(horizon, 10), (horizon,), seed=1))
    return engine


class TestSnapshots:
    def test_uniform_first_step_population(self):
        engine = _uniform_engine(n_residents=4, horizon=1)
        engine.run(until=1)
        snaps = snapshot(engine.accumulator, 1, engine.instance)
        housing = [s for s in snaps if s.kind == "housing"]
        assert len(housing) == 8
        for s in housing:
            assert s.exp_pop == pytest.approx(4.0 / 8.0, rel=1e-12)
            assert s.populated
        amenity_rows = [s for s in snaps if s.kind == "amenity"]
        assert len(amenity_rows) == 1
        assert amenity_rows[0].exp_pop == 0.0

    def test_rows_sorted_by_site_id(self):
        engine = _uniform_engine()
        engine.run(until=1)
        snaps = snapshot(engine.accumulator, 1, engine.instance)
        assert [s.site_id for s in snaps] == sorted(s.site_id for s in snaps)

    def test_unrecorded_checkpoint_rejected(self):
        engine = _uniform_engine()
        engine.run(until=1)
        with pytest.raises(ValueError, match="not a recorded checkpoint"):
            snapshot(engine.accumulator, 7, engine.instance)

    def test_unpopulated_guard(self):
        engine = _uniform_engine()
        engine.run(until=1)
        pop, wealth = engine.accumulator.frozen[1]
        pop = pop.copy()
        wealth = wealth.copy()
        pop[0] = 0.0
        wealth[0] = 0.0
        acc = EquilibriumAccumulator(pop_acc=pop, wealth_acc=wealth, frozen={1: (pop, wealth)})
        snaps = snapshot(acc, 1, engine.instance)
        flagged = [s for s in snaps if not s.populated and s.kind == "housing"]
        assert len(flagged) == 1
        assert flagged[0].exp_mean_endow == 0.0

    def test_mean_endowment_within_wealth_range(self):
        engine = _uniform_engine(n_residents=6, horizon=25)
        engine.run()
        snaps = snapshot(engine.accumulator, 25, engine.instance)
        w = generate_endowments(6).w
        for s in snaps:
            if s.kind == "housing" and s.populated:
                assert w.min() - 1e-12 <= s.exp_mean_endow <= w.max() + 1e-12

    def test_two_step_prefix_average_hand_check(self):
        engine = _uniform_engine(n_residents=3, horizon=2)
        # After two steps the frozen average equals (pop_t1 + pop_t2) / 2,
        # with pop_t taken from the strategies that generated step t.
        running = []
        for _ in range(2):
            p_before = engine.p.copy()
            engine.step()
            running.append(p_before.sum(axis=0))
        manual = (running[0] + running[1]) / 2.0
        snaps = snapshot(engine.accumulator, 2, engine.instance)
        housing = {s.site_id: s for s in snaps if s.kind == "housing"}
        for i, site_id in enumerate(engine.instance.housing_ids):
            assert housing[site_id].exp_pop == pytest.approx(manual[i], rel=1e-12)

    def test_csv_round_trip_exact(self, tmp_path):
        engine = _uniform_engine(n_residents=5, horizon=9)
        engine.run(until=9)
        snaps = snapshot(engine.accumulator, 9, engine.instance)
        path = tmp_path / "snap.csv"
        write_snapshot_csv(path, snaps)
        assert read_snapshot_csv(path) == snaps

    def test_csv_header_checked(self, tmp_path):
        path = tmp_path / "snap.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")
        with pytest.raises(ValueError, match="header"):
            read_snapshot_csv(path)

    def test_geojson_structure(self, tmp_path):
        engine = _uniform_engine()
        engine.run(until=1)
        snaps = snapshot(engine.accumulator, 1, engine.instance)
        path = tmp_path / "snap.geojson"
        write_snapshot_geojson(path, snaps)
        doc = json.loads(path.read_text())
        assert doc["type"] == "FeatureCollection"
        assert len(doc["features"]) == len(snaps)
        feature = doc["features"][0]
        assert feature["geometry"]["type"] == "Point"
        assert set(feature["properties"]) == {
            "site_id", "kind", "amenity_score", "exp_pop",
            "exp_total_endow", "exp_mean_endow", "populated_flag",
        }


class TestRender:
    def _snaps_and_graph(self):
        engine = _uniform_engine(n_residents=5, horizon=12)
        engine.run()
        return snapshot(engine.accumulator, 12, engine.instance), engine.instance.graph

    def test_svg_parses_and_counts_amenities(self):
        snaps, graph = self._snaps_and_graph()
        svg = render_svg(snaps, graph)
        root = ET.fromstring(svg)
        circles = [el for el in root.iter() if el.tag.endswith("circle")]
        blue = [c for c in circles if c.get("fill") == AMENITY_COLOR]
        assert len(blue) == 1
        housing_circles = [c for c in circles if c.get("fill") != AMENITY_COLOR]
        assert len(housing_circles) == 8

    def test_svg_deterministic(self):
        snaps, graph = self._snaps_and_graph()
        assert render_svg(snaps, graph) == render_svg(snaps, graph)

    def test_degenerate_normalization_maps_to_midpoint(self):
        snaps, graph = self._snaps_and_graph()
        flat = [
            SiteSnapshot(s.site_id, s.lon, s.lat, s.kind, s.amenity_score,
                         1.0 if s.kind == "housing" else 0.0,
                         0.5 if s.kind == "housing" else 0.0,
                         0.5 if s.kind == "housing" else 0.0,
                         s.kind == "housing")
            for s in snaps
        ]
        svg = render_svg(flat, graph)
        root = ET.fromstring(svg)
        fills = {
            c.get("fill")
            for c in root.iter()
            if c.tag.endswith("circle") and c.get("fill") != AMENITY_COLOR
        }
        assert fills == {"#ffa500"}  # ramp midpoint: orange

    def test_zero_population_site_is_gray_minimum_radius(self):
        snaps, graph = self._snaps_and_graph()
        tweaked = []
        for s in snaps:
            if s.kind == "housing" and s.site_id == "r000c000":
                tweaked.append(SiteSnapshot(s.site_id, s.lon, s.lat, s.kind,
                                            s.amenity_score, 0.0, 0.0, 0.0, False))
            else:
                tweaked.append(s)
        svg = render_svg(tweaked, graph)
        root = ET.fromstring(svg)
        gray = [c for c in root.iter()
                if c.tag.endswith("circle") and c.get("fill") == "#b4b4b4"]
        assert len(gray) == 1
        assert gray[0].get("r") == "1.50"


class TestRunConfigValidation:
    def test_requires_exactly_one_source(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig(seed=1, out_dir=str(tmp_path))
        with pytest.raises(ConfigError):
            RunConfig(seed=1, out_dir=str(tmp_path), graph_path="g.json", grid=(3, 3))

    def test_rejects_bad_lists(self, tmp_path):
        with pytest.raises(ConfigError):
            RunConfig(seed=1, out_dir=str(tmp_path), grid=(3, 3), rho_list=())
        with pytest.raises(ConfigError):
            RunConfig(seed=1, out_dir=str(tmp_path), grid=(3, 3), lambda_list=(1.5,))
        with pytest.raises(ConfigError):
            RunConfig(seed=1, out_dir=str(tmp_path), grid=(3, 3), rho_list=(0,))
        with pytest.raises(ConfigError):
            RunConfig(seed=1, out_dir=str(tmp_path), grid=(3, 3),
                      horizon=10, checkpoints=(5, 20))
        with pytest.raises(ConfigError):
            RunConfig(seed=1, out_dir=str(tmp_path), grid=(3, 3), cce_samples_per_step=0)

    def test_checkpoints_default_to_horizon(self, tmp_path):
        config = RunConfig(seed=1, out_dir=str(tmp_path), grid=(3, 3), horizon=25)
        assert config.checkpoints == (25,)

    def test_semantic_labels(self):
        assert semantic_label(0.75) == "amenity-weighted"
        assert semantic_label(0.25) == "community-weighted"
        assert semantic_label(0.5) == "balanced"


class TestRunMatrix:
    def test_single_cell_layout(self, tmp_path):
        config = small_run_config(tmp_path, render=True)
        dirs = run_matrix(config)
        assert len(dirs) == 1
        cell = dirs[0]
        assert cell.name == cell_dir_name(2, 0.5) == "rho2_lam0.5"
        assert (cell.parent / "graph.json").is_file()  # generated grid recorded
        for t in (15, 30):
            assert (cell / f"T{t}" / "snapshot.csv").is_file()
            assert (cell / f"T{t}" / "snapshot.geojson").is_file()
            assert (cell / f"T{t}" / "map.svg").is_file()
        manifest = json.loads((cell / "manifest.json").read_text())
        for key in ("config", "endowments", "per_agent_regret", "max_regret",
                    "cce_gap", "cce_gap_std_error", "wall_clock_s", "counts"):
            assert key in manifest
        assert manifest["cell"]["label"] == "balanced"
        assert len(manifest["per_agent_regret"]) == 6
        assert len(manifest["endowments"]) == 6

    def test_matrix_counts(self, tmp_path):
        config = small_run_config(
            tmp_path,
            rho_list=(1, 2),
            lambda_list=(0.25, 0.75),
            horizon=8,
            checkpoints=(4, 8),
        )
        dirs = run_matrix(config)
        assert len(dirs) == 4
        snapshot_sets = [
            p for d in dirs for p in d.glob("T*/snapshot.csv")
        ]
        assert len(snapshot_sets) == 8

    def test_rerun_bitwise_identical_csv_and_svg(self, tmp_path):
        config_a = small_run_config(tmp_path / "a", render=True)
        config_b = small_run_config(tmp_path / "b", render=True)
        dirs_a = run_matrix(config_a)
        dirs_b = run_matrix(config_b)
        for da, db in zip(dirs_a, dirs_b):
            for rel in ("T15/snapshot.csv", "T30/snapshot.csv",
                        "T15/snapshot.geojson", "T30/map.svg"):
                assert (da / rel).read_bytes() == (db / rel).read_bytes()

    def test_worker_count_does_not_change_outputs(self, tmp_path):
        base = dict(rho_list=(1, 2), lambda_list=(0.25,), horizon=12, checkpoints=(12,))
        dirs_seq = run_matrix(small_run_config(tmp_path / "w1", workers=1, **base))
        dirs_par = run_matrix(small_run_config(tmp_path / "w2", workers=2, **base))
        assert len(dirs_seq) == len(dirs_par) == 2
        for ds, dp in zip(sorted(dirs_seq), sorted(dirs_par)):
            assert (ds / "T12/snapshot.csv").read_bytes() == (dp / "T12/snapshot.csv").read_bytes()

    def test_independent_runs_mode(self, tmp_path):
        config = small_run_config(tmp_path, independent_runs=True, horizon=30,
                                  checkpoints=(10, 30))
        (cell,) = run_matrix(config)
        manifest = json.loads((cell / "manifest.json").read_text())
        assert manifest["cell"]["mode"] == "independent"
        assert (cell / "T10" / "snapshot.csv").is_file()
        assert (cell / "T30" / "snapshot.csv").is_file()

    def test_population_conserved_in_emitted_snapshots(self, tmp_path):
        config = small_run_config(tmp_path)
        (cell,) = run_matrix(config)
        for t in (15, 30):
            snaps = read_snapshot_csv(cell / f"T{t}" / "snapshot.csv")
            total = sum(s.exp_pop for s in snaps)
            assert total == pytest.approx(6.0, rel=1e-6)
