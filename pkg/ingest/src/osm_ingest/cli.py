"""Command line: `osmgraph ingest ...` and `osmgraph validate ...`."""

from __future__ import annotations

import argparse
import logging
import sys

from .ingest import IngestError, IngestSpec, ingest, read_stations
from .validate import validate_graph_file


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osmgraph",
        description="Produce and check street-network graph files for the simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ing = sub.add_parser("ingest", help="build a graph file for a study region")
    ing.add_argument("--zip", dest="postal_code", default=None,
                     help="postal code to download from OpenStreetMap (needs osmnx)")
    ing.add_argument("--cache", default=None, metavar="FILE",
                     help="cached raw-extract JSON instead of a live download")
    ing.add_argument("--stations", required=True, metavar="FILE.csv",
                     help="station list with columns name, lat, lon")
    ing.add_argument("--out", required=True, metavar="graph.json")
    ing.add_argument("--network-type", default="drive", choices=("drive", "walk", "all"),
                     help="street network type for live downloads (default: drive)")

    val = sub.add_parser("validate", help="check a graph file against the format contract")
    val.add_argument("path", metavar="graph.json")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)

    if args.command == "validate":
        report = validate_graph_file(args.path)
        for line in report.lines():
            print(line)
        return 0 if report.ok else 1

    try:
        stations = read_stations(args.stations)
        spec = IngestSpec(
            out_path=args.out,
            stations=stations,
            postal_code=args.postal_code,
            cache_path=args.cache,
            network_type=args.network_type,
        )
        path = ingest(spec)
    except IngestError as exc:
        print(f"osmgraph: {exc}", file=sys.stderr)
        return 2
    report = validate_graph_file(path)
    for line in report.lines():
        print(line)
    return 0 if report.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
