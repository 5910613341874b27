"""Street-network ingest for the relocation-dynamics graph format."""

from .extract import RawNetwork, load_extract
from .ingest import IngestError, IngestSpec, ingest, read_stations
from .snap import great_circle_m, snap_stations
from .validate import ValidationReport, validate_graph_file

__version__ = "0.1.0"
