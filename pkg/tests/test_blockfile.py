import numpy as np
import pytest

from dicat.blockfile import (
    BlockFileError, DimensionError, HeaderError, TruncatedDataError, load_block, save_block,
)
from dicat.catalyst import precompute_catalyst_1d, tent_block


def test_round_trip_2d(tmp_path, block16):
    p = tmp_path / "b.dicat"
    save_block(block16, p)
    b = load_block(p)
    assert np.array_equal(b.H0, block16.H0) and np.array_equal(b.F0, block16.F0)
    assert (b.lx, b.ly, b.dim) == (16, 16, 2)
    assert b.origin_return_fraction == block16.origin_return_fraction
    assert b.target_error == block16.target_error and b.origin_is_catalyst


def test_round_trip_1d(tmp_path):
    blk = precompute_catalyst_1d(7, 1e-3)
    p = tmp_path / "one.dicat"
    save_block(blk, p)
    b = load_block(p)
    assert b.dim == 1 and b.ly == 0
    assert np.array_equal(b.H0, blk.H0) and np.array_equal(b.F0, blk.F0)


def test_layout(tmp_path):
    p = tmp_path / "t.dicat"
    save_block(tent_block(2), p)
    lines = p.read_text().split("\n")
    assert lines[0] == "DICAT 1"
    assert lines[1].startswith("dim=1 lx=2 ly=0 ")
    assert lines[2].split() == ["0", "0.5", "1", "0.5", "0"]
    assert lines[3] == ""
    assert b"\r" not in p.read_bytes()


def _write(tmp_path, text):
    p = tmp_path / "x.dicat"
    p.write_text(text)
    return p


def test_wrong_magic(tmp_path):
    with pytest.raises(HeaderError):
        load_block(_write(tmp_path, "DICAT 2\n"))


def test_bad_header(tmp_path):
    with pytest.raises(HeaderError):
        load_block(_write(tmp_path, "DICAT 1\ndim=1 lx=2\n"))


def test_dimension_mismatch(tmp_path):
    text = "DICAT 1\ndim=1 lx=1 ly=0 target=0 return=0.5 origin_catalyst=1\n0 1 0 0\n\n0 0 0\n"
    with pytest.raises(DimensionError):
        load_block(_write(tmp_path, text))


def test_truncated(tmp_path):
    text = "DICAT 1\ndim=2 lx=1 ly=1 target=0 return=0.5 origin_catalyst=1\n0 0 0\n0 1 0\n"
    with pytest.raises(TruncatedDataError):
        load_block(_write(tmp_path, text))


def test_non_numeric(tmp_path):
    text = "DICAT 1\ndim=1 lx=1 ly=0 target=0 return=0.5 origin_catalyst=1\n0 x 0\n\n0 0 0\n"
    with pytest.raises(BlockFileError):
        load_block(_write(tmp_path, text))


def test_errors_are_distinct():
    assert len({HeaderError, DimensionError, TruncatedDataError}) == 3
    assert all(issubclass(e, BlockFileError) for e in (HeaderError, DimensionError, TruncatedDataError))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_block(tmp_path / "nope.dicat")
