"""ASCII persistence of catalyst blocks.

Layout (LF line endings)::

    DICAT 1
    dim=2 lx=100 ly=100 target=0.001 return=0.75... origin_catalyst=1
    <2*lx+1 lines of 2*ly+1 values: H0, x = -lx..lx>

    <same for F0>

1D blocks use ``ly=0`` and store a single row for each array.  Values are
written with 17 significant digits so a round trip is exact.
"""

from __future__ import annotations

import os

import numpy as np

from .catalyst import CatalystBlock

MAGIC = "DICAT 1"


class BlockFileError(ValueError):
    """Base class for unreadable block files."""


class HeaderError(BlockFileError):
    pass


class DimensionError(BlockFileError):
    pass


class TruncatedDataError(BlockFileError):
    pass


def _fmt_row(row: np.ndarray) -> str:
    return " ".join(format(float(v), ".17g") for v in row)


def save_block(block: CatalystBlock, path) -> None:
    rows_h = block.H0.reshape(1, -1) if block.dim == 1 else block.H0
    rows_f = block.F0.reshape(1, -1) if block.dim == 1 else block.F0
    header = (f"dim={block.dim} lx={block.lx} ly={block.ly} "
              f"target={block.target_error!r} return={block.origin_return_fraction!r} "
              f"origin_catalyst={int(block.origin_is_catalyst)}")
    with open(path, "w", newline="\n") as fh:
        fh.write(MAGIC + "\n")
        fh.write(header + "\n")
        for row in rows_h:
            fh.write(_fmt_row(row) + "\n")
        fh.write("\n")
        for row in rows_f:
            fh.write(_fmt_row(row) + "\n")


def _parse_header(line: str) -> dict:
    fields = {}
    for item in line.split():
        key, sep, value = item.partition("=")
        if not sep:
            raise HeaderError(f"malformed header field {item!r}")
        fields[key] = value
    missing = {"dim", "lx", "ly", "target", "return", "origin_catalyst"} - fields.keys()
    if missing:
        raise HeaderError(f"header lacks {sorted(missing)}")
    try:
        return dict(dim=int(fields["dim"]), lx=int(fields["lx"]), ly=int(fields["ly"]),
                    target=float(fields["target"]), ret=float(fields["return"]),
                    catalyst=bool(int(fields["origin_catalyst"])))
    except ValueError as exc:
        raise HeaderError(f"bad header value: {exc}") from None


def load_block(path) -> CatalystBlock:
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path) as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0].strip() != MAGIC:
        raise HeaderError(f"{path}: expected magic line {MAGIC!r}")
    if len(lines) < 2:
        raise TruncatedDataError(f"{path}: missing header line")
    h = _parse_header(lines[1])
    dim, lx, ly = h["dim"], h["lx"], h["ly"]
    if dim not in (1, 2) or lx < 1 or (dim == 2 and ly < 1) or (dim == 1 and ly != 0):
        raise DimensionError(f"{path}: invalid extents dim={dim} lx={lx} ly={ly}")
    nrows = 1 if dim == 1 else 2 * lx + 1
    ncols = 2 * lx + 1 if dim == 1 else 2 * ly + 1
    body = lines[2:]
    need = 2 * nrows + 1
    if len(body) < need:
        raise TruncatedDataError(f"{path}: expected {need} data lines, found {len(body)}")
    if body[nrows].strip():
        raise DimensionError(f"{path}: H0 block has more than {nrows} rows")

    def parse(chunk, name):
        out = np.empty((nrows, ncols))
        for i, line in enumerate(chunk):
            parts = line.split()
            if not parts:
                raise TruncatedDataError(f"{path}: {name} row {i} is empty")
            if len(parts) != ncols:
                raise DimensionError(f"{path}: {name} row {i} has {len(parts)} values, expected {ncols}")
            try:
                out[i] = np.array(parts, dtype=float)
            except ValueError:
                raise BlockFileError(f"{path}: {name} row {i} holds a non-numeric value") from None
        return out

    H0 = parse(body[:nrows], "H0")
    F0 = parse(body[nrows + 1:need], "F0")
    if any(line.strip() for line in body[need:]):
        raise DimensionError(f"{path}: trailing data after F0")
    if dim == 1:
        H0, F0 = H0[0], F0[0]
    return CatalystBlock(dim, lx, ly, H0, F0, h["target"], h["ret"], h["catalyst"])
