"""Raw field dumps for restart and debugging (not a stable format).

Layout: a 32-byte little-endian header ``magic[8], N1, N2, N3, reserved``
(uint32 each) and ``t`` (float64), followed by ``N1*N2*N3`` complex128
values flattened x-fastest.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .grid import Grid3

MAGIC = b"DNLSFLD1"
_HEADER = struct.Struct("<8s4Id")
assert _HEADER.size == 32


def write_snapshot(path, grid: Grid3, U, t: float) -> None:
    v = grid.flatten(np.asarray(U, dtype=complex))
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, *grid.counts, 0, float(t)))
        fh.write(v.astype("<c16").tobytes())


def read_snapshot(path) -> tuple[tuple[int, int, int], float, np.ndarray]:
    """Return ``(counts, t, U)`` with ``U`` shaped ``(N1, N2, N3)``."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, n1, n2, n3, _, t = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a field snapshot")
    body = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
    if body.size != n1 * n2 * n3:
        raise ValueError(f"{path}: expected {n1 * n2 * n3} values, found {body.size}")
    return (n1, n2, n3), t, body.reshape((n1, n2, n3), order="F").astype(complex)
