"""Checkpoint and diagnostics file formats.

Checkpoint (little-endian)::

    magic    4 bytes  b"PEQC"
    version  u32      1
    nx ny nz u32 x 3
    h f0 nu_h nu_z kappa_h eps time   float64 x 7
    v1, v2, T  float64 arrays, physical space, z fastest, then y, then x

Diagnostics CSV: header row with the ``DiagRecord`` column names, then one
row per record, every value formatted with 17 significant digits.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .estimates import norm_panel
from .fields import DiagRecord, Params, State
from .grid import make_grid

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "CheckpointError",
    "write_checkpoint",
    "read_checkpoint",
    "format_value",
    "DiagnosticsCSV",
    "write_csv",
]

MAGIC = b"PEQC"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sI3I7d")


class CheckpointError(ValueError):
    pass


def write_checkpoint(path, state: State, params: Params) -> None:
    g = state.grid
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, g.nx, g.ny, g.nz, g.h, params.f0,
                          params.nu_h, params.nu_z, params.kappa_h, params.eps, state.time)
    with open(path, "wb") as fh:
        fh.write(header)
        for a in state.arrays():
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def read_checkpoint(path) -> tuple[State, Params]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise CheckpointError("file shorter than the checkpoint header")
    magic, version, nx, ny, nz, h, f0, nu_h, nu_z, kappa_h, eps, time = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CheckpointError(f"bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported format version {version}")
    n = nx * ny * nz
    if len(raw) != _HEADER.size + 3 * 8 * n:
        raise CheckpointError(f"payload length {len(raw) - _HEADER.size} does not match "
                              f"declared size {nx}x{ny}x{nz}")
    grid = make_grid(nx, ny, nz, h)
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(3, nx, ny, nz)
    state = State.from_arrays(grid, data[0], data[1], data[2], time)
    return state, Params(h=h, f0=f0, nu_h=nu_h, nu_z=nu_z, kappa_h=kappa_h, eps=eps)


def format_value(x: float) -> str:
    return "%.17g" % x


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(x) for x in row) + "\n")


class DiagnosticsCSV:
    """Run-loop sink writing one ``DiagRecord`` row per call."""

    def __init__(self, path, params: Params):
        self.path = Path(path)
        self.params = params
        self.records: list[DiagRecord] = []
        self._fh = open(self.path, "w", newline="")
        self._fh.write(",".join(DiagRecord.columns()) + "\n")

    def __call__(self, state: State) -> None:
        rec = norm_panel(state, self.params)
        self.records.append(rec)
        self._fh.write(",".join(format_value(x) for x in rec.values()) + "\n")

    def flush(self) -> None:
        if not self._fh.closed:
            self._fh.flush()

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()
