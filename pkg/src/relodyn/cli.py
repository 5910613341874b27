"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys

from .graphs import GraphFormatError
from .harness import ConfigError, RunConfig, run_matrix
from .verify import run_verification


def _parse_int_list(text: str, name: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad {name} list {text!r}: expected comma-separated integers") from exc


def _parse_float_list(text: str, name: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad {name} list {text!r}: expected comma-separated numbers") from exc


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"bad grid spec {text!r}: expected ROWSxCOLS, e.g. 12x12")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relodyn",
        description="Deterministic residential relocation dynamics on road networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the (rho, lambda) experiment matrix")
    src = run.add_mutually_exclusive_group(required=False)
    src.add_argument("--graph", metavar="PATH", help="graph file in the standard format")
    src.add_argument("--grid", metavar="RxC", help="synthetic grid, e.g. 12x12")
    run.add_argument(
        "--amenities",
        default="center",
        help='grid amenity cells: "center" or "r,c;r,c" (grid mode only)',
    )
    run.add_argument("--residents", type=int, default=None,
                     help="resident count (default: number of housing sites)")
    run.add_argument("--rho", default="1", metavar="LIST",
                     help="comma-separated zoning caps, e.g. 1,2,4,8")
    run.add_argument("--lambda", dest="lam", default="0.5", metavar="LIST",
                     help="comma-separated amenity weights in [0,1], e.g. 0.25,0.75")
    run.add_argument("--horizon", type=int, default=5000, metavar="T")
    run.add_argument("--checkpoints", default="", metavar="LIST",
                     help="comma-separated step counts (default: horizon only)")
    run.add_argument("--seed", type=int, default=None,
                     help="64-bit run seed (required; no default)")
    run.add_argument("--out", default=None, metavar="DIR", help="output directory (required)")
    run.add_argument("--cce-samples", type=int, default=1, metavar="N",
                     help="equilibrium-gap samples per step")
    run.add_argument("--render", action="store_true", help="also write map.svg per checkpoint")
    run.add_argument("--independent-runs-per-checkpoint", action="store_true",
                     dest="independent_runs",
                     help="run each checkpoint as its own horizon instead of prefix averages")
    run.add_argument("--workers", type=int, default=1,
                     help="parallel worker processes across matrix cells")
    run.add_argument("--verify", action="store_true",
                     help="run the built-in property suite on a small instance and exit")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "run" and args.verify:
        return 0 if run_verification() else 3

    try:
        if args.seed is None:
            raise ConfigError("--seed is required (runs are never implicitly seeded)")
        if args.out is None:
            raise ConfigError("--out is required")
        if args.graph is None and args.grid is None:
            raise ConfigError("one of --graph or --grid is required")
        config = RunConfig(
            seed=args.seed,
            out_dir=args.out,
            graph_path=args.graph,
            grid=_parse_grid(args.grid) if args.grid else None,
            grid_amenities=args.amenities,
            residents=args.residents,
            rho_list=_parse_int_list(args.rho, "rho"),
            lambda_list=_parse_float_list(args.lam, "lambda"),
            horizon=args.horizon,
            checkpoints=_parse_int_list(args.checkpoints, "checkpoints"),
            cce_samples_per_step=args.cce_samples,
            render=args.render,
            independent_runs=args.independent_runs,
            workers=args.workers,
        )
    except (ConfigError, GraphFormatError) as exc:
        print(f"relodyn: config error: {exc}", file=sys.stderr)
        return 2

    try:
        dirs = run_matrix(config)
    except (ConfigError, GraphFormatError) as exc:
        print(f"relodyn: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"relodyn: runtime error: {exc}", file=sys.stderr)
        return 3

    for d in dirs:
        print(d)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
