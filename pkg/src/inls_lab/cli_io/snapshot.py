"""Fixed little-endian snapshot files.

Layout: ``b"INLS"``, u32 version (1), u64 n, f64 half_width, f64 time, then
``n`` complex samples as (f64 re, f64 im) pairs.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, SnapshotError
from ..spectral_core import Grid

__all__ = ["Snapshot", "write_snapshot", "read_snapshot", "MAGIC", "VERSION"]

MAGIC = b"INLS"
VERSION = 1
_HEADER = struct.Struct("<4sIQdd")
_DATA = np.dtype("<c16")


@dataclass
class Snapshot:
    grid: Grid
    values: np.ndarray
    time: float


def write_snapshot(values, grid: Grid, time: float, path) -> Path:
    values = np.asarray(values)
    if values.shape != (grid.n,):
        raise SnapshotError(f"field has shape {values.shape}, grid expects ({grid.n},)")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, grid.n, grid.half_width, float(time)))
        fh.write(values.astype(_DATA, copy=False).tobytes())
    return path


def read_snapshot(path) -> Snapshot:
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise SnapshotError(f"cannot read {path}: {exc}") from None
    if len(blob) < _HEADER.size:
        raise SnapshotError(f"{path}: truncated header")
    magic, version, n, half_width, time = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise SnapshotError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise SnapshotError(f"{path}: unsupported version {version}")
    body = len(blob) - _HEADER.size
    if body != n * _DATA.itemsize:
        raise SnapshotError(f"{path}: header declares n={n} but payload holds {body} bytes")
    try:
        grid = Grid(int(n), half_width)
    except ConfigurationError as exc:
        raise SnapshotError(f"{path}: invalid grid in header: {exc}") from None
    values = np.frombuffer(blob, dtype=_DATA, offset=_HEADER.size).astype(complex)
    return Snapshot(grid, values, time)
