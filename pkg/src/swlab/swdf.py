"""SWDF binary field dumps.

A record stores one scalar grid field with enough header to replot it:

    magic   4 bytes  b"SWDF"
    ndim    uint32
    dims    ndim * uint32
    spacing ndim * float64
    source  uint64           (source node for distance fields, else a tag)
    epsilon float64
    values  prod(dims) * float64, C order

All integers and floats are little-endian.  Trajectory dumps are a plain
concatenation of snapshot blocks, each a float64 time stamp followed by two
records (displacement, then velocity) whose source slot carries the snapshot
ordinal.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"SWDF"


@dataclass(frozen=True)
class SwdfRecord:
    dims: tuple
    spacing: tuple
    source: int
    epsilon: float
    values: np.ndarray


def _write_record(fh, dims, spacing, source: int, epsilon: float,
                  values: np.ndarray) -> None:
    dims = tuple(int(d) for d in dims)
    spacing = tuple(float(s) for s in spacing)
    values = np.asarray(values, dtype="<f8").ravel()
    if values.size != int(np.prod(dims)):
        raise ValueError("value count does not match the dims")
    fh.write(MAGIC)
    fh.write(struct.pack("<I", len(dims)))
    fh.write(struct.pack(f"<{len(dims)}I", *dims))
    fh.write(struct.pack(f"<{len(dims)}d", *spacing))
    fh.write(struct.pack("<Q", int(source)))
    fh.write(struct.pack("<d", float(epsilon)))
    fh.write(values.tobytes())


def _read_record(fh) -> SwdfRecord:
    magic = fh.read(4)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    (ndim,) = struct.unpack("<I", fh.read(4))
    dims = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
    spacing = struct.unpack(f"<{ndim}d", fh.read(8 * ndim))
    (source,) = struct.unpack("<Q", fh.read(8))
    (epsilon,) = struct.unpack("<d", fh.read(8))
    count = int(np.prod(dims))
    values = np.frombuffer(fh.read(8 * count), dtype="<f8").copy()
    return SwdfRecord(dims=dims, spacing=spacing, source=source,
                      epsilon=epsilon, values=values)


def write_distance_field(path, dist) -> None:
    with open(path, "wb") as fh:
        _write_record(fh, dist.grid.dims, dist.grid.spacing, dist.source,
                      dist.epsilon, dist.values)


def read_distance_field(path) -> SwdfRecord:
    with open(path, "rb") as fh:
        return _read_record(fh)


def write_field(path, grid, values: np.ndarray, source: int = 0,
                epsilon: float = 0.0) -> None:
    with open(path, "wb") as fh:
        _write_record(fh, grid.dims, grid.spacing, source, epsilon, values)


def write_trajectory(path, traj, grid, epsilon: float = 0.0) -> None:
    """Snapshot sequence: (time, u record, v record) per snapshot."""
    with open(path, "wb") as fh:
        for k, snap in enumerate(traj.snapshots):
            fh.write(struct.pack("<d", float(snap.t)))
            _write_record(fh, grid.dims, grid.spacing, k, epsilon, snap.u)
            _write_record(fh, grid.dims, grid.spacing, k, epsilon, snap.v)


def read_trajectory(path) -> list:
    """Inverse of write_trajectory: list of (time, u record, v record)."""
    out = []
    with open(path, "rb") as fh:
        while True:
            raw = fh.read(8)
            if not raw:
                break
            (t,) = struct.unpack("<d", raw)
            u = _read_record(fh)
            v = _read_record(fh)
            out.append((t, u, v))
    return out
