import struct

import numpy as np

from swlab import swdf
from swlab.distance import riemannian_distance_field
from swlab.geometry import assemble_sum_of_squares, build_grid, make_fields
from swlab.wave import WaveState, solve_wave
from tests.conftest import interior_bump


def test_distance_field_roundtrip(tmp_path):
    g = build_grid([(0.0, 1.0), (-1.0, 2.0)], (9, 11))
    fields = make_fields("euclidean", 2)
    d = riemannian_distance_field(g, fields, 0.25, 13)
    path = tmp_path / "field.swdf"
    swdf.write_distance_field(path, d)
    rec = swdf.read_distance_field(path)
    assert rec.dims == g.dims
    assert np.allclose(rec.spacing, g.spacing)
    assert rec.source == 13
    assert rec.epsilon == 0.25
    assert np.array_equal(rec.values, d.values)


def test_header_layout_little_endian(tmp_path):
    g = build_grid([(0.0, 1.0)], 3)
    path = tmp_path / "tiny.swdf"
    swdf.write_field(path, g, np.array([1.0, 2.0, 3.0]), source=7,
                     epsilon=0.5)
    blob = path.read_bytes()
    assert blob[:4] == b"SWDF"
    assert struct.unpack("<I", blob[4:8])[0] == 1          # ndim
    assert struct.unpack("<I", blob[8:12])[0] == 3         # dims
    assert struct.unpack("<d", blob[12:20])[0] == 0.5      # spacing
    assert struct.unpack("<Q", blob[20:28])[0] == 7        # source
    assert struct.unpack("<d", blob[28:36])[0] == 0.5      # epsilon
    assert np.array_equal(np.frombuffer(blob[36:], dtype="<f8"),
                          [1.0, 2.0, 3.0])
    assert len(blob) == 36 + 24


def test_trajectory_roundtrip(tmp_path):
    g = build_grid([(0.0, 1.0)], 33)
    op = assemble_sum_of_squares(make_fields("euclidean", 1), g)
    u0 = interior_bump(g.coords(), (0.5,), 0.2)
    traj = solve_wave(op, WaveState(u=u0, v=np.zeros_like(u0)), 0.2,
                      snapshot_stride=4)
    path = tmp_path / "traj.swdf"
    swdf.write_trajectory(path, traj, g, epsilon=0.0)
    records = swdf.read_trajectory(path)
    assert len(records) == len(traj.snapshots)
    for (t, u_rec, v_rec), snap in zip(records, traj.snapshots):
        assert t == snap.t
        assert np.array_equal(u_rec.values, snap.u)
        assert np.array_equal(v_rec.values, snap.v)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "junk.swdf"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    try:
        swdf.read_distance_field(path)
        raised = False
    except ValueError:
        raised = True
    assert raised
