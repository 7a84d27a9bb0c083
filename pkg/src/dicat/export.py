"""Write solution fields as CSV, binary PGM or a gnuplot script."""

from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

FORMATS = ("csv", "pgm", "gnuplot")


def write_csv(field: np.ndarray, path, eps: float = 1.0, extra: dict | None = None) -> Path:
    """Rows ``x,y,value`` (``y`` is 0 for 1D fields); ``extra`` adds named 1D columns."""
    field = np.asarray(field, float)
    if field.ndim not in (1, 2):
        raise ValueError("field must be 1D or 2D")
    path = Path(path)
    grid = field.reshape(field.shape[0], -1)
    extra = extra or {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "value", *extra])
        for i in range(grid.shape[0]):
            for j in range(grid.shape[1]):
                cols = [repr(float(np.ravel(v)[i])) for v in extra.values()]
                w.writerow([repr(i * eps), repr(j * eps), repr(float(grid[i, j])), *cols])
    return path


def read_csv_field(path, eps: float = 1.0) -> np.ndarray:
    """Inverse of :func:`write_csv` for the value column."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    ix = np.rint(data["x"] / eps).astype(int)
    iy = np.rint(data["y"] / eps).astype(int)
    out = np.zeros((ix.max() + 1, iy.max() + 1))
    out[ix, iy] = data["value"]
    return out[:, 0] if out.shape[1] == 1 else out


def to_gray(field: np.ndarray) -> np.ndarray:
    field = np.asarray(field, float)
    lo, hi = float(field.min()), float(field.max())
    if hi == lo:
        return np.zeros(field.shape, np.uint8)
    return np.rint(255 * (field - lo) / (hi - lo)).astype(np.uint8)


def write_pgm(field: np.ndarray, path) -> Path:
    """8-bit binary PGM (P5), min-max normalised; rows of the image follow y."""
    gray = np.atleast_2d(to_gray(field).T if np.ndim(field) == 2 else to_gray(field))
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{gray.shape[1]} {gray.shape[0]}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(gray).tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][: w * h], np.uint8).reshape(h, w)


def write_gnuplot(field: np.ndarray, path, eps: float = 1.0) -> Path:
    """A gnuplot script plus the CSV it reads (same stem, ``.csv``)."""
    path = Path(path)
    data = path.with_suffix(".csv")
    write_csv(field, data, eps)
    if np.ndim(field) == 1:
        body = f"plot '{data.name}' using 1:3 with lines title 'solution'\n"
    else:
        body = ("set view map\nset pm3d at b\n"
                f"splot '{data.name}' using 1:2:3 with pm3d title 'solution'\n")
    path.write_text("set datafile separator ','\nset key autotitle columnhead\n" + body)
    return path


def export_field(field: np.ndarray, fmt: str, path, eps: float = 1.0) -> Path:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    parent = os.path.dirname(os.fspath(path)) or "."
    if not os.path.isdir(parent):
        raise FileNotFoundError(f"directory {parent} does not exist")
    if fmt == "csv":
        return write_csv(field, path, eps)
    if fmt == "pgm":
        return write_pgm(field, path)
    return write_gnuplot(field, path, eps)
