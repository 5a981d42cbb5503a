import struct

import numpy as np
import pytest

from conftest import random_field
from dnls3d.grid import Grid3
from dnls3d.snapshot import MAGIC, read_snapshot, write_snapshot


def test_round_trip(tmp_path, rng):
    g = Grid3((4, 6, 2))
    U = random_field(rng, g)
    path = tmp_path / "u.bin"
    write_snapshot(path, g, U, 0.625)
    counts, t, V = read_snapshot(path)
    assert counts == (4, 6, 2)
    assert t == 0.625
    np.testing.assert_array_equal(V, U)


def test_layout(tmp_path, rng):
    g = Grid3((4, 2, 2))
    U = random_field(rng, g)
    path = tmp_path / "u.bin"
    write_snapshot(path, g, U, 1.5)
    data = path.read_bytes()
    assert len(data) == 32 + 16 * g.size
    assert struct.unpack("<8s4Id", data[:32]) == (MAGIC, 4, 2, 2, 0, 1.5)
    body = np.frombuffer(data[32:], dtype="<c16")
    # x index varies fastest
    assert body[1] == U[1, 0, 0]
    assert body[4] == U[0, 1, 0]
    assert body[8] == U[0, 0, 1]


def test_rejects_foreign_and_truncated_files(tmp_path, rng):
    g = Grid3.cube(2)
    good = tmp_path / "u.bin"
    write_snapshot(good, g, random_field(rng, g), 0.0)
    data = good.read_bytes()
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"NOTAFILE" + data[8:])
    with pytest.raises(ValueError, match="not a field snapshot"):
        read_snapshot(bad)
    bad.write_bytes(data[:-16])
    with pytest.raises(ValueError, match="expected 8"):
        read_snapshot(bad)
    bad.write_bytes(data[:20])
    with pytest.raises(ValueError, match="truncated"):
        read_snapshot(bad)
