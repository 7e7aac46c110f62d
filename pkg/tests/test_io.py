import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from edgeocc.core import DisparityMap, OcclusionMask, step_scene
from edgeocc.evaluation import render_confusion
from edgeocc.io import (
    FormatError,
    load_mask,
    read_mask,
    read_pfm,
    save_confusion,
    save_mask,
    write_mask,
    write_pfm,
)

f32 = st.floats(-1e6, 1e6, width=32, allow_nan=False, allow_infinity=False)


def test_header_and_layout():
    data = write_pfm(DisparityMap([[1.0, 2.0], [3.0, 4.0]]))
    assert data.startswith(b"Pf\n2 2\n-1.0\n")
    body = data[len(b"Pf\n2 2\n-1.0\n"):]
    # PFM rows run bottom-up
    assert struct.unpack("<4f", body) == (3.0, 4.0, 1.0, 2.0)


def test_little_endian_document_order():
    raw = b"Pf\n2 2\n-1.0\n" + struct.pack("<4f", 1, 2, 3, 4)
    assert read_pfm(raw).values.tolist() == [[3, 4], [1, 2]]


def test_big_endian():
    raw = b"Pf\n2 1\n1.0\n" + struct.pack(">2f", 1.5, -2.0)
    assert read_pfm(raw).values.tolist() == [[1.5, -2.0]]


def test_constant_payload():
    data = write_pfm(np.full((3, 4), 7.0))
    body = data[-48:]
    assert len({body[i:i + 4] for i in range(0, 48, 4)}) == 1


@given(arrays(np.float32, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=f32))
def test_round_trip_bit_exact(v):
    data = write_pfm(DisparityMap(v))
    assert read_pfm(data).values.astype(np.float32).tobytes() == v.tobytes()
    assert write_pfm(read_pfm(data)) == data


def test_errors():
    with pytest.raises(FormatError, match="single-channel"):
        read_pfm(b"PF\n1 1\n-1.0\n" + b"\0" * 12)
    with pytest.raises(FormatError, match="magic"):
        read_pfm(b"P5\n1 1\n255\n\0")
    with pytest.raises(FormatError, match="truncated"):
        read_pfm(b"Pf\n4 4\n-1.0\n" + b"\0" * 10)
    with pytest.raises(FormatError):
        read_pfm(b"Pf\n1 1\n0\n" + b"\0" * 4)


def test_nonfinite_policy():
    raw = b"Pf\n2 1\n-1.0\n" + struct.pack("<2f", 3.0, float("inf"))
    with pytest.raises(ValueError, match="non-finite"):
        read_pfm(raw)
    assert read_pfm(raw, sanitize=True).values.tolist() == [[3.0, 3.0]]


@given(arrays(bool, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_mask_round_trip(bits):
    m = OcclusionMask(bits)
    for fmt in ("PPM", "PNG"):
        assert read_mask(write_mask(m, fmt)) == m


def test_mask_values_and_threshold():
    data = write_mask(OcclusionMask.zeros(2, 3))
    assert data.startswith(b"P5")
    assert data.endswith(b"\0" * 6)
    seven = b"P5\n2 1\n255\n" + bytes([0, 7])
    with pytest.raises(FormatError, match="non-binary"):
        read_mask(seven)
    assert read_mask(seven, threshold=5).bits.tolist() == [[False, True]]


def test_files(tmp_path):
    m = OcclusionMask(step_scene().values > 4)
    save_mask(tmp_path / "m.pgm", m)
    save_mask(tmp_path / "m.png", m)
    assert load_mask(tmp_path / "m.pgm") == m == load_mask(tmp_path / "m.png")
    save_confusion(tmp_path / "c.ppm", render_confusion(m, m))
    assert (tmp_path / "c.ppm").read_bytes().startswith(b"P6")
