"""Deterministic simulator of residential relocation dynamics on road
networks via no-regret learning."""

from .costs import (
    DegenerateGeometryError,
    ModelParams,
    OccupancyIndex,
    StepFields,
    affordability,
    build_step_fields,
    community_field,
    community_score,
    cost,
    cost_matrix,
    cost_vector,
    upkeep,
)
from .engine import (
    CceGapEstimate,
    Engine,
    EngineConfig,
    EquilibriumAccumulator,
    RegretLedger,
    SpatialInstance,
    empirical_regret,
    init_state,
    mwu_step_size,
    mwu_update,
    probabilities,
)
from .graphs import (
    GraphFormatError,
    NormalizedDistances,
    RoadGraph,
    SitePartition,
    amenity_score,
    amenity_scores,
    compute_normalized_distances,
    load_graph,
    parse_graph,
    restrict_to_largest_scc,
)
from .grids import generate_grid, grid_document
from .harness import ConfigError, RunConfig, run_cell, run_matrix, semantic_label
from .population import EndowmentProfile, generate_endowments, lorenz
from .render import render_svg
from .snapshots import SiteSnapshot, read_snapshot_csv, snapshot, write_snapshot_csv

__version__ = "0.1.0"
