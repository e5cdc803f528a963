"""Configuration, persistence and the command-line surface."""

from .cli import COMMANDS, main, run
from .config import RunConfig, load_config, parse_config
from .snapshot import Snapshot, read_snapshot, write_snapshot
from .tables import DIAGNOSTIC_COLUMNS, read_csv, write_csv, write_summary

__all__ = [
    "COMMANDS",
    "main",
    "run",
    "RunConfig",
    "load_config",
    "parse_config",
    "Snapshot",
    "read_snapshot",
    "write_snapshot",
    "DIAGNOSTIC_COLUMNS",
    "read_csv",
    "write_csv",
    "write_summary",
]
