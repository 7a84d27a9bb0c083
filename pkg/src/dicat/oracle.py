"""Independent reference solutions used to check the iterative solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _kernels as K
from .diffusion import Stencil, laplacian_stencil
from .grid import Domain, fill_interior

DENSE_LIMIT = 4096


def _system(domain: Domain, stencil: Stencil | None, f):
    """Sparse (I - P) restricted to interior unknowns, plus right-hand side."""
    stencil = stencil or laplacian_stencil(domain)
    shape = domain.shape
    inner = domain.interior
    idx = -np.ones(shape, dtype=np.int64)
    idx[inner] = np.arange(domain.n_interior)
    b = np.zeros(domain.n_interior)
    if f is not None:
        b += (stencil.source_coef * fill_interior(domain, f))[inner]
    rows, cols, vals = [], [], []
    nodes = np.argwhere(inner)
    me = idx[inner]
    rows.append(me)
    cols.append(me)
    vals.append(np.ones(len(me)))
    for d, off in enumerate(stencil.offsets):
        nb = nodes + np.asarray(off)
        ok = np.all((nb >= 0) & (nb < np.asarray(shape)), axis=1)
        w = stencil.weights[d][inner]
        nbt = tuple(nb[ok].T)
        j = idx[nbt]
        inside = j >= 0
        rows.append(me[ok][inside])
        cols.append(j[inside])
        vals.append(-w[ok][inside])
        # known boundary values move to the right-hand side
        np.add.at(b, me[ok][~inside], w[ok][~inside] * domain.g[nbt][~inside])
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(domain.n_interior,) * 2)
    return A, b


def _assemble(domain: Domain, x: np.ndarray) -> np.ndarray:
    out = np.where(domain.boundary, domain.g, 0.0).astype(float)
    out[domain.interior] = x
    return out


def direct_solve_1d(domain: Domain, stencil: Stencil | None = None, f=None) -> np.ndarray:
    """Banded LU solve of a 1D problem (tridiagonal, interior unknowns only)."""
    if domain.dimension != 1:
        raise ValueError("direct_solve_1d needs a 1D domain")
    A, b = _system(domain, stencil, f)
    n = A.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = A.diagonal(1)
    ab[1] = A.diagonal()
    ab[2, :-1] = A.diagonal(-1)
    return _assemble(domain, scipy.linalg.solve_banded((1, 1), ab, b))


def direct_solve_2d_small(domain: Domain, stencil: Stencil | None = None, f=None) -> np.ndarray:
    """Dense LU solve; refuses systems above ``DENSE_LIMIT`` unknowns."""
    if domain.n_interior > DENSE_LIMIT:
        raise ValueError(f"{domain.n_interior} unknowns exceed the dense limit of {DENSE_LIMIT}")
    A, b = _system(domain, stencil, f)
    return _assemble(domain, np.linalg.solve(A.toarray(), b))


def sparse_solve(domain: Domain, stencil: Stencil | None = None, f=None) -> np.ndarray:
    """Sparse direct solve (SuperLU) for grids of any size."""
    A, b = _system(domain, stencil, f)
    return _assemble(domain, spla.spsolve(A.tocsc(), b))


@dataclass
class WalkEstimate:
    mean: float
    stderr: float
    count: int
    seed: int

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        return self.mean - z * self.stderr, self.mean + z * self.stderr


def monte_carlo_harmonic(domain: Domain, start_node, walkers: int, seed: int,
                         max_steps: int = 10**9) -> WalkEstimate:
    """Mean boundary value hit by simple random walks from ``start_node``.

    Estimates the discrete harmonic extension of ``g`` (no source term).  The
    result is reproducible for a given ``seed`` regardless of thread count.
    """
    start = tuple(int(c) for c in np.atleast_1d(start_node))
    if len(start) != domain.dimension:
        raise ValueError("start node has the wrong dimension")
    if walkers < 2:
        raise ValueError("need at least two walkers")
    if any(not 0 <= c < n for c, n in zip(start, domain.shape)):
        raise IndexError(f"start node {start} outside the domain")
    if domain.boundary[start]:
        return WalkEstimate(float(domain.g[start]), 0.0, walkers, seed)
    bnd = domain.boundary
    g = domain.g.astype(float)
    if domain.dimension == 1:
        vals = K.walk_1d(bnd, g, start[0], walkers, seed, max_steps)
    else:
        vals = K.walk_2d(bnd, g, start[0], start[1], walkers, seed, max_steps)
    lost = np.isnan(vals)
    if lost.any():
        raise RuntimeError(f"{lost.sum()} walks exceeded {max_steps} steps")
    return WalkEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(walkers)), walkers, seed)
